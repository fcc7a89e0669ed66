// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace homwalk
{
//! Base class for all library errors.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class LogDomainError : public Error
{
    using Error::Error;
};

class InvalidRadius : public Error
{
    using Error::Error;
};

class BudgetExceeded : public Error
{
    using Error::Error;
};

class AtomBudgetExceeded : public BudgetExceeded
{
    using BudgetExceeded::BudgetExceeded;
};

class NodeBudgetExceeded : public BudgetExceeded
{
    using BudgetExceeded::BudgetExceeded;
};

class UnknownPreset : public Error
{
    using Error::Error;
};

class ParseError : public Error
{
    using Error::Error;
};

//! Carries every violation found, each prefixed by its field path.
class ValidationError : public Error
{
  public:
    explicit ValidationError(std::vector<std::string> problems);

    std::vector<std::string> const& problems() const { return problems_; }

  private:
    std::vector<std::string> problems_;
};

}  // namespace homwalk
