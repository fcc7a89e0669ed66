// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "stats.hpp"

namespace homwalk
{
using Cell = std::variant<std::int64_t, double, std::string>;

//! One CSV grid: header plus rows in deterministic order.
struct Table
{
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
};

struct FitRecord
{
    std::string name;
    std::string x;  //!< regressor description
    std::string y;  //!< response description
    OlsFit fit;
    double confidence{0.95};
};

struct Verdict
{
    std::string name;
    bool pass;
    double value;
    double threshold;
    std::string detail;
};

/*!
 * Result of one experiment.
 *
 * Tables become CSV files; fits, verdicts and scalars become JSONL
 * records. Every numeric field is a deterministic function of the inputs
 * and the seed; wall-clock time is kept out of the tables.
 */
struct ExperimentReport
{
    std::string name;
    std::deque<Table> tables;  //!< deque keeps table references stable
    std::vector<FitRecord> fits;
    std::vector<Verdict> verdicts;
    std::vector<std::pair<std::string, double>> scalars;
    bool partial{false};
    std::string note;
    double wall_seconds{0};

    Table& table(std::string const& table_name, std::vector<std::string> columns);
    void verdict(std::string v_name, bool pass, double value, double threshold,
                 std::string detail = {});
    void scalar(std::string s_name, double value);

    //! All verdicts pass.
    bool passed() const;
    Verdict const* find_verdict(std::string const& v_name) const;
    double find_scalar(std::string const& s_name) const;
    FitRecord const* find_fit(std::string const& f_name) const;
};

}  // namespace homwalk
