// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#include "homwalk/errors.hpp"

#include <fmt/format.h>

namespace homwalk
{
ValidationError::ValidationError(std::vector<std::string> problems)
    : Error(fmt::format("invalid configuration:\n  {}",
                        fmt::join(problems, "\n  ")))
    , problems_(std::move(problems))
{
}

}  // namespace homwalk
