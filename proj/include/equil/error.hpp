// Copyright 2026 The equil Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EQUIL_ERROR_HPP_
#define EQUIL_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace equil
{

/// Base class for all errors thrown by the library.
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

/// A row or column of the (squared) matrix is structurally zero, so a
/// reciprocal scaling factor does not exist.
class ZeroRowOrColumn : public Error
{
public:
    ZeroRowOrColumn(const std::string& what, std::size_t index)
        : Error(what + " (index " + std::to_string(index) + ")"), index_(index)
    {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// A stochastic probe produced an all-zero squared image.
class DegenerateProbe : public Error
{
public:
    DegenerateProbe(const std::string& what, std::size_t iteration)
        : Error(what + " at iteration " + std::to_string(iteration)),
          iteration_(iteration)
    {}

    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

class ParseError : public Error
{
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ": " + what), line_(line)
    {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class UnsupportedFormat : public Error
{
public:
    using Error::Error;
};

class SizeCapExceeded : public Error
{
public:
    using Error::Error;
};

class GenerationFailed : public Error
{
public:
    using Error::Error;
};

class ConfigError : public Error
{
public:
    using Error::Error;
};

} // namespace equil

#endif // EQUIL_ERROR_HPP_
