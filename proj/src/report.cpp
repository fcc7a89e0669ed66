// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#include "homwalk/report.hpp"

#include <algorithm>
#include <limits>

#include <fmt/core.h>

#include "homwalk/errors.hpp"

namespace homwalk
{
void Table::add(std::vector<Cell> row)
{
    if (row.size() != columns.size())
    {
        throw Error(fmt::format("table {} expects {} columns, got {}", name, columns.size(),
                                row.size()));
    }
    rows.push_back(std::move(row));
}

Table& ExperimentReport::table(std::string const& table_name, std::vector<std::string> columns)
{
    for (auto& t : tables)
        if (t.name == table_name)
            return t;
    tables.push_back({table_name, std::move(columns), {}});
    return tables.back();
}

void ExperimentReport::verdict(std::string v_name, bool pass, double value, double threshold,
                               std::string detail)
{
    verdicts.push_back({std::move(v_name), pass, value, threshold, std::move(detail)});
}

void ExperimentReport::scalar(std::string s_name, double value)
{
    scalars.emplace_back(std::move(s_name), value);
}

bool ExperimentReport::passed() const
{
    return std::all_of(verdicts.begin(), verdicts.end(),
                       [](Verdict const& v) { return v.pass; });
}

Verdict const* ExperimentReport::find_verdict(std::string const& v_name) const
{
    for (auto const& v : verdicts)
        if (v.name == v_name)
            return &v;
    return nullptr;
}

double ExperimentReport::find_scalar(std::string const& s_name) const
{
    for (auto const& [k, v] : scalars)
        if (k == s_name)
            return v;
    return std::numeric_limits<double>::quiet_NaN();
}

FitRecord const* ExperimentReport::find_fit(std::string const& f_name) const
{
    for (auto const& f : fits)
        if (f.name == f_name)
            return &f;
    return nullptr;
}

}  // namespace homwalk
