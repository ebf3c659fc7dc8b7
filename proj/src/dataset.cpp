#include "dpalm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "dpalm/al.hpp"
#include "dpalm/apg.hpp"
#include "dpalm/instances.hpp"
#include "dpalm/rng.hpp"

namespace dpalm {

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t line, const std::string& what) {
    std::ostringstream os;
    os << path << ":" << line << ": " << what;
    throw std::runtime_error(os.str());
}

double parse_label(const std::string& token, const std::string& path, std::size_t line) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(token, &pos);
        if (pos != token.size()) parse_fail(path, line, "bad label '" + token + "'");
        if (v == 1.0) return 1.0;
        if (v == -1.0) return -1.0;
        parse_fail(path, line, "unknown label value '" + token + "'");
    } catch (const std::invalid_argument&) {
        parse_fail(path, line, "bad label '" + token + "'");
    } catch (const std::out_of_range&) {
        parse_fail(path, line, "bad label '" + token + "'");
    }
}

double logistic(double y) {
    if (y >= 0.0) return 1.0 / (1.0 + std::exp(-y));
    const double e = std::exp(y);
    return e / (1.0 + e);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

} // namespace

Dataset load_libsvm(const std::string& path, Index n_features) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);

    std::vector<double> labels;
    std::vector<std::vector<std::pair<Index, double>>> rows;
    Index max_index = 0;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream is(line);
        std::string token;
        is >> token;
        labels.push_back(parse_label(token, path, line_no));
        std::vector<std::pair<Index, double>> row;
        while (is >> token) {
            const auto colon = token.find(':');
            if (colon == std::string::npos)
                parse_fail(path, line_no, "expected idx:val, got '" + token + "'");
            Index idx = 0;
            double val = 0.0;
            try {
                idx = static_cast<Index>(std::stoll(token.substr(0, colon)));
                val = std::stod(token.substr(colon + 1));
            } catch (const std::exception&) {
                parse_fail(path, line_no, "bad feature entry '" + token + "'");
            }
            if (idx < 1) parse_fail(path, line_no, "feature index must be 1-based");
            if (n_features > 0 && idx > n_features)
                parse_fail(path, line_no, "feature index out of range");
            max_index = std::max(max_index, idx);
            row.emplace_back(idx - 1, val);
        }
        rows.push_back(std::move(row));
    }

    const Index width = n_features > 0 ? n_features : max_index;
    Dataset ds;
    ds.features = Matrix::Zero(static_cast<Index>(rows.size()), width);
    ds.labels = Vector(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        ds.labels[static_cast<Index>(i)] = labels[i];
        for (const auto& [idx, val] : rows[i]) ds.features(static_cast<Index>(i), idx) = val;
    }
    ds.protected_mask.assign(rows.size(), 0);
    ds.heldout_mask.assign(rows.size(), 0);
    return ds;
}

Dataset load_csv(const std::string& path, const std::string& label_column,
                 const std::string& group_column) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);

    std::string line;
    if (!std::getline(in, line)) return Dataset{};
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_csv_line(line);
    Index label_idx = -1, group_idx = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == label_column) label_idx = static_cast<Index>(i);
        if (header[i] == group_column) group_idx = static_cast<Index>(i);
    }
    if (label_idx < 0) throw std::runtime_error("label column not found: " + label_column);
    if (group_idx < 0) throw std::runtime_error("group column not found: " + group_column);

    std::vector<std::vector<double>> feature_rows;
    std::vector<double> labels;
    std::vector<std::uint8_t> groups;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            parse_fail(path, line_no, "field count mismatch");
        std::vector<double> row;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            double v = 0.0;
            try {
                v = std::stod(fields[i]);
            } catch (const std::exception&) {
                parse_fail(path, line_no, "non-numeric field '" + fields[i] + "'");
            }
            if (static_cast<Index>(i) == label_idx) {
                if (v == 1.0) labels.push_back(1.0);
                else if (v == 0.0 || v == -1.0) labels.push_back(-1.0);
                else parse_fail(path, line_no, "unknown label value '" + fields[i] + "'");
            } else if (static_cast<Index>(i) == group_idx) {
                groups.push_back(v != 0.0 ? 1 : 0);
            } else {
                row.push_back(v);
            }
        }
        feature_rows.push_back(std::move(row));
    }

    Dataset ds;
    const Index rows = static_cast<Index>(feature_rows.size());
    const Index cols = rows > 0 ? static_cast<Index>(feature_rows.front().size()) : 0;
    ds.features = Matrix(rows, cols);
    ds.labels = Vector(rows);
    for (Index i = 0; i < rows; ++i) {
        ds.labels[i] = labels[static_cast<std::size_t>(i)];
        for (Index j = 0; j < cols; ++j)
            ds.features(i, j) = feature_rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    ds.protected_mask = std::move(groups);
    ds.heldout_mask.assign(static_cast<std::size_t>(rows), 0);
    return ds;
}

void assign_group_by_feature(Dataset& ds, Index feature) {
    if (feature < 0 || feature >= ds.dim())
        throw std::invalid_argument("group feature index out of range");
    ds.protected_mask.assign(static_cast<std::size_t>(ds.samples()), 0);
    for (Index i = 0; i < ds.samples(); ++i)
        ds.protected_mask[static_cast<std::size_t>(i)] = ds.features(i, feature) != 0.0 ? 1 : 0;
}

namespace {

struct IndexSet {
    std::vector<Index> rows;
    Matrix features;
    Vector labels;
};

IndexSet gather(const Dataset& ds, const std::vector<Index>& rows) {
    IndexSet set;
    set.rows = rows;
    set.features = Matrix(static_cast<Index>(rows.size()), ds.dim());
    set.labels = Vector(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        set.features.row(static_cast<Index>(i)) = ds.features.row(rows[i]);
        set.labels[static_cast<Index>(i)] = ds.labels[rows[i]];
    }
    return set;
}

double least_squares_loss(const Matrix& X, const Vector& y, const Vector& w) {
    if (X.rows() == 0) return 0.0;
    return (X * w - y).squaredNorm() / (2.0 * static_cast<double>(X.rows()));
}

Vector least_squares_grad(const Matrix& X, const Vector& y, const Vector& w) {
    return Vector(X.transpose() * (X * w - y) / static_cast<double>(X.rows()));
}

} // namespace

FairnessBuild build_fairness(const Dataset& ds, std::uint64_t split_seed, double radius,
                             double fit_tol) {
    if (ds.samples() == 0) throw std::invalid_argument("empty dataset");
    const Index d = ds.dim();

    // Split about one third of the samples into the held-out set D.
    SeededRng rng(split_seed);
    std::vector<Index> held, rest;
    for (Index i = 0; i < ds.samples(); ++i)
        (rng.uniform() < 1.0 / 3.0 ? held : rest).push_back(i);
    std::vector<Index> prot, unprot;
    for (Index i : rest)
        (ds.protected_mask[static_cast<std::size_t>(i)] ? prot : unprot).push_back(i);
    if (held.empty()) throw std::runtime_error("held-out split is empty");
    if (prot.empty() || unprot.empty()) throw std::runtime_error("a group is empty");

    auto D = std::make_shared<IndexSet>(gather(ds, held));
    auto P = std::make_shared<IndexSet>(gather(ds, prot));
    auto U = std::make_shared<IndexSet>(gather(ds, unprot));
    auto PU = std::make_shared<IndexSet>();
    {
        std::vector<Index> both = prot;
        both.insert(both.end(), unprot.begin(), unprot.end());
        std::sort(both.begin(), both.end());
        *PU = gather(ds, both);
    }

    // Fit x_mat = argmin over the radius ball of the held-out loss. The tiny
    // Tikhonov term supplies the strong convexity APG requires; its size is
    // negligible against the loss curvature.
    FairnessBuild build;
    {
        const Matrix gram = Matrix(D->features.transpose() * D->features) /
                            static_cast<double>(D->features.rows());
        SeededRng power_rng(split_seed ^ 0x9e3779b97f4a7c15ULL);
        const double gram_norm = spectral_norm(gram, power_rng);
        const double mu = 1e-8 * std::max(1.0, gram_norm);

        SubproblemSplit fit;
        fit.smooth_value = [D](const Vector& w) {
            return least_squares_loss(D->features, D->labels, w);
        };
        fit.smooth_grad = [D](const Vector& w) {
            return least_squares_grad(D->features, D->labels, w);
        };
        fit.prox_reg = make_box(d, -radius, radius);
        fit.prox_anchor = Vector::Zero(d);
        fit.prox_shift = mu;
        fit.mu = mu;
        fit.lipschitz_estimate = gram_norm;

        ApgConfig cfg;
        cfg.L0 = std::max(gram_norm, 1.0);
        cfg.delta = fit_tol;
        cfg.max_iters = 200000;
        build.x_mat = apg_minimize(fit, cfg, Vector::Zero(d)).x;
    }

    build.heldout_loss = least_squares_loss(D->features, D->labels, build.x_mat);
    build.theta = (D->features * build.x_mat).mean();
    build.gamma_slack = 2.0 * build.heldout_loss;
    const double loss_threshold = build.heldout_loss + build.gamma_slack;
    const double theta = build.theta;

    ProblemInstance inst;
    inst.dim = d;
    inst.reg = make_box(d, -radius, radius);

    CompositeF f;
    f.outer = OuterKind::Abs;
    f.inner_dim = 1;
    f.outer_lipschitz = 1.0;
    f.inner_value = [P, U, theta](const Vector& x) {
        Vector out(1);
        double mean_p = 0.0, mean_u = 0.0;
        const Vector sp = P->features * x;
        const Vector su = U->features * x;
        for (Index i = 0; i < sp.size(); ++i) mean_p += logistic(sp[i] - theta);
        for (Index i = 0; i < su.size(); ++i) mean_u += logistic(su[i] - theta);
        out[0] = mean_p / static_cast<double>(sp.size()) - mean_u / static_cast<double>(su.size());
        return out;
    };
    f.inner_jacobian = [P, U, theta, d](const Vector& x) {
        Matrix J = Matrix::Zero(1, d);
        const Vector sp = P->features * x;
        const Vector su = U->features * x;
        Vector row = Vector::Zero(d);
        for (Index i = 0; i < sp.size(); ++i) {
            const double s = logistic(sp[i] - theta);
            row += s * (1.0 - s) / static_cast<double>(sp.size()) *
                   P->features.row(i).transpose();
        }
        for (Index i = 0; i < su.size(); ++i) {
            const double s = logistic(su[i] - theta);
            row -= s * (1.0 - s) / static_cast<double>(su.size()) *
                   U->features.row(i).transpose();
        }
        J.row(0) = row.transpose();
        return J;
    };
    // sup |sigma''| = 1/(6 sqrt(3)); curvature bound over both group means.
    const double sigma_pp = 1.0 / (6.0 * std::sqrt(3.0));
    const double mean_sq_p = P->features.rowwise().squaredNorm().mean();
    const double mean_sq_u = U->features.rowwise().squaredNorm().mean();
    f.inner_smoothness = sigma_pp * (mean_sq_p + mean_sq_u);
    inst.rho = f.outer_lipschitz * f.inner_smoothness;
    inst.objective = std::move(f);

    inst.ineq.m = 1;
    {
        auto data = PU;
        inst.ineq.oracle = [data, loss_threshold, d](const Vector& x) {
            Vector g(1);
            g[0] = least_squares_loss(data->features, data->labels, x) - loss_threshold;
            Matrix J(1, d);
            J.row(0) = least_squares_grad(data->features, data->labels, x).transpose();
            return std::make_pair(std::move(g), std::move(J));
        };
        const Matrix gram = Matrix(PU->features.transpose() * PU->features) /
                            static_cast<double>(PU->features.rows());
        SeededRng power_rng(split_seed ^ 0xda3e39cb94b95bdbULL);
        inst.ineq.smoothness = spectral_norm(gram, power_rng);
        double val_bound = 0.0, grad_bound = 0.0;
        for (Index i = 0; i < PU->features.rows(); ++i) {
            const double s =
                radius * PU->features.row(i).lpNorm<1>() + std::abs(PU->labels[i]);
            val_bound += s * s;
            grad_bound += s * PU->features.row(i).norm();
        }
        const double N = static_cast<double>(PU->features.rows());
        inst.ineq.value_grad_bound =
            std::max(val_bound / (2.0 * N) + loss_threshold, grad_bound / N);
    }

    build.g_at_xmat = inst.ineq.oracle(build.x_mat).first[0];
    build.feasible_at_xmat = build.g_at_xmat < 0.0;
    bool interior = true;
    for (Index i = 0; i < d; ++i)
        if (std::abs(build.x_mat[i]) >= radius) interior = false;
    if (build.feasible_at_xmat && interior) inst.x_feas = build.x_mat;

    build.heldout_mask.assign(static_cast<std::size_t>(ds.samples()), 0);
    for (Index i : held) build.heldout_mask[static_cast<std::size_t>(i)] = 1;
    build.inst = std::move(inst);
    return build;
}

} // namespace dpalm
