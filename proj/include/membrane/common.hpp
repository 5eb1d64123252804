#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace membrane {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat9 = Eigen::Matrix<double, 9, 9>;
using Mat69 = Eigen::Matrix<double, 6, 9>;
using VectorX = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Voigt slots, in the order used by every strain/stress vector in this library.
enum Voigt : int { kXX = 0, kYY = 1, kZZ = 2, kXY = 3, kYZ = 4, kXZ = 5 };

constexpr int kDofsPerNode = 3;

// Error hierarchy. The CLI maps ConfigError to exit code 2 and
// NumericalError to exit code 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class MeshError : public Error {
public:
    using Error::Error;
};

class MaterialError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class ElementError : public Error {
public:
    ElementError(const std::string& what, int element)
        : Error("element " + std::to_string(element) + ": " + what), element_(element) {}
    int element() const { return element_; }

private:
    int element_;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace membrane
