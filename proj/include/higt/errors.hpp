#pragma once
#include <stdexcept>
#include <string>

namespace higt {

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error
{
public:
    using Error::Error;
};

/// A row of X or Y has (numerically) zero variance and cannot be standardized.
class ConstantRow : public Error
{
public:
    ConstantRow(std::size_t row, std::string matrix)
        : Error("constant row " + std::to_string(row) + " in " + matrix),
          row_(row),
          matrix_(std::move(matrix))
    {}

    std::size_t row() const noexcept { return row_; }
    const std::string& matrix() const noexcept { return matrix_; }

private:
    std::size_t row_;
    std::string matrix_;
};

class InvalidGroups : public Error
{
public:
    using Error::Error;
};

class EmptyGroups : public Error
{
public:
    using Error::Error;
};

class NotLeaf : public Error
{
public:
    using Error::Error;
};

class NotInternal : public Error
{
public:
    using Error::Error;
};

class NonFiniteObjective : public Error
{
public:
    using Error::Error;
};

class InfeasibleConfig : public Error
{
public:
    using Error::Error;
};

class ParseError : public Error
{
public:
    using Error::Error;
};

} // namespace higt
