#include "dpalm/trace.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dpalm {

namespace {

constexpr const char* kHeader = "k,beta,v,alpha,pres,dres,cs,inner_iters,grad_evals,wall_ms";

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& token, const std::string& name, std::size_t line) {
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end == token.c_str())
        throw std::runtime_error(name + ": bad numeric field at line " + std::to_string(line));
    return v;
}

} // namespace

void write_trace(const std::vector<IterationRecord>& rows, std::ostream& out,
                 bool include_timing) {
    out << kHeader << "\n";
    for (const auto& r : rows) {
        out << r.k << ',' << fmt(r.beta) << ',' << fmt(r.v) << ',' << fmt(r.alpha) << ','
            << fmt(r.pres) << ',' << fmt(r.dres) << ',' << fmt(r.cs) << ',' << r.inner_iters
            << ',' << r.grad_evals << ',' << fmt(include_timing ? r.wall_ms : 0.0) << "\n";
    }
}

void write_trace_file(const std::vector<IterationRecord>& rows, const std::string& path,
                      bool include_timing) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
        write_trace(rows, out, include_timing);
        if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

std::vector<IterationRecord> read_trace(std::istream& in, const std::string& name) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(name + ": empty trace");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader) throw std::runtime_error(name + ": trace schema mismatch");

    std::vector<IterationRecord> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string field;
        std::istringstream is(line);
        while (std::getline(is, field, ',')) fields.push_back(field);
        if (fields.size() != 10)
            throw std::runtime_error(name + ": trace schema mismatch at line " +
                                     std::to_string(line_no));
        IterationRecord r;
        r.k = std::stol(fields[0]);
        r.beta = parse_double(fields[1], name, line_no);
        r.v = parse_double(fields[2], name, line_no);
        r.alpha = parse_double(fields[3], name, line_no);
        r.pres = parse_double(fields[4], name, line_no);
        r.dres = parse_double(fields[5], name, line_no);
        r.cs = parse_double(fields[6], name, line_no);
        r.inner_iters = std::stol(fields[7]);
        r.grad_evals = std::stol(fields[8]);
        r.wall_ms = parse_double(fields[9], name, line_no);
        rows.push_back(r);
    }
    return rows;
}

std::vector<IterationRecord> read_trace_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return read_trace(in, path);
}

namespace {

MetricStat stat_of(const std::vector<double>& values) {
    MetricStat s;
    if (values.empty()) return s;
    for (double v : values) s.mean += v;
    s.mean /= static_cast<double>(values.size());
    for (double v : values) s.variance += (v - s.mean) * (v - s.mean);
    s.variance /= static_cast<double>(values.size());
    return s;
}

} // namespace

SummaryRow summarize_traces(const std::string& family, double rho,
                            const std::vector<std::vector<IterationRecord>>& traces) {
    SummaryRow row;
    row.family = family;
    row.rho = rho;
    row.runs = static_cast<long>(traces.size());
    std::vector<double> pres, dres, cs, grads, wall;
    for (const auto& trace : traces) {
        if (trace.empty()) throw std::invalid_argument("cannot summarize an empty trace");
        const auto& last = trace.back();
        pres.push_back(last.pres);
        dres.push_back(last.dres);
        cs.push_back(last.cs);
        grads.push_back(static_cast<double>(last.grad_evals));
        double total_ms = 0.0;
        for (const auto& r : trace) total_ms += r.wall_ms;
        wall.push_back(total_ms);
    }
    row.pres = stat_of(pres);
    row.dres = stat_of(dres);
    row.cs = stat_of(cs);
    row.grad_evals = stat_of(grads);
    row.wall_ms = stat_of(wall);
    return row;
}

void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out) {
    out << "family,rho,runs,pres_avg,pres_var,dres_avg,dres_var,cs_avg,cs_var,"
           "grad_evals_avg,grad_evals_var,wall_ms_avg,wall_ms_var\n";
    for (const auto& r : rows) {
        out << r.family << ',' << fmt(r.rho) << ',' << r.runs << ',' << fmt(r.pres.mean) << ','
            << fmt(r.pres.variance) << ',' << fmt(r.dres.mean) << ',' << fmt(r.dres.variance)
            << ',' << fmt(r.cs.mean) << ',' << fmt(r.cs.variance) << ','
            << fmt(r.grad_evals.mean) << ',' << fmt(r.grad_evals.variance) << ','
            << fmt(r.wall_ms.mean) << ',' << fmt(r.wall_ms.variance) << "\n";
    }
}

} // namespace dpalm
