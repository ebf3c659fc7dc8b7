#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dpalm/solver.hpp"

namespace dpalm {

/// Header `k,beta,v,alpha,pres,dres,cs,inner_iters,grad_evals,wall_ms`;
/// floats carry 17 significant digits so values round-trip exactly.
/// include_timing = false zeroes the wall_ms column for byte comparisons.
void write_trace(const std::vector<IterationRecord>& rows, std::ostream& out,
                 bool include_timing = true);

/// Atomic file variant (temp + rename).
void write_trace_file(const std::vector<IterationRecord>& rows, const std::string& path,
                      bool include_timing = true);

std::vector<IterationRecord> read_trace(std::istream& in, const std::string& name = "<stream>");
std::vector<IterationRecord> read_trace_file(const std::string& path);

struct MetricStat {
    double mean = 0.0;
    double variance = 0.0; // population variance
};

struct SummaryRow {
    std::string family;
    double rho = 0.0;
    long runs = 0;
    MetricStat pres, dres, cs, grad_evals, wall_ms;
};

/// Final-row pres/dres/cs, total grad_evals, and total wall time per trace,
/// averaged with population variance over the group.
SummaryRow summarize_traces(const std::string& family, double rho,
                            const std::vector<std::vector<IterationRecord>>& traces);

void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out);

} // namespace dpalm
