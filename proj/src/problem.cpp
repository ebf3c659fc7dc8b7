#include "dpalm/problem.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dpalm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string dim_msg(const char* what, Index got, Index want) {
    std::ostringstream os;
    os << what << " (got " << got << ", expected " << want << ")";
    return os.str();
}
} // namespace

Regularizer make_box(const Vector& lower, const Vector& upper) {
    Regularizer reg;
    reg.kind = RegKind::BoxIndicator;
    reg.lower = lower;
    reg.upper = upper;
    return reg;
}

Regularizer make_box(Index d, double lo, double hi) {
    return make_box(Vector::Constant(d, lo), Vector::Constant(d, hi));
}

Regularizer make_box_l1(Index d, double lo, double hi, double lambda) {
    Regularizer reg = make_box(d, lo, hi);
    reg.kind = RegKind::BoxL1;
    reg.lambda = lambda;
    return reg;
}

Regularizer make_free(Index d) {
    Regularizer reg = make_box(d, -kInf, kInf);
    reg.kind = RegKind::ZeroOnBox;
    return reg;
}

double box_diameter(const Regularizer& reg) {
    double sum = 0.0;
    for (Index i = 0; i < reg.lower.size(); ++i) {
        const double w = reg.upper[i] - reg.lower[i];
        if (std::isinf(w)) return kInf;
        sum += w * w;
    }
    return std::sqrt(sum);
}

double objective_value(const ProblemInstance& inst, const Vector& x) {
    return std::visit(
        [&](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, SmoothF>) {
                return f.value(x);
            } else if constexpr (std::is_same_v<T, CompositeF>) {
                return f.inner_value(x).cwiseAbs().sum();
            } else {
                return f.value(x);
            }
        },
        inst.objective);
}

std::pair<Vector, Matrix> eval_ineq_block(const ProblemInstance& inst, const Vector& x) {
    if (x.size() != inst.dim)
        throw std::invalid_argument(dim_msg("point dimension mismatch", x.size(), inst.dim));
    if (inst.ineq.m == 0) return {Vector::Zero(0), Matrix::Zero(0, inst.dim)};
    auto [g, J] = inst.ineq.oracle(x);
    if (g.size() != inst.ineq.m)
        throw std::runtime_error(dim_msg("inequality value size mismatch", g.size(), inst.ineq.m));
    if (J.rows() != inst.ineq.m || J.cols() != inst.dim)
        throw std::runtime_error("inequality Jacobian shape mismatch");
    return {std::move(g), std::move(J)};
}

std::vector<std::string> validate_instance(const ProblemInstance& inst) {
    std::vector<std::string> report;
    const Index d = inst.dim;

    if (d <= 0) report.push_back("nonpositive dimension");
    if (!(inst.rho > 0.0)) report.push_back("weak-convexity constant rho must be positive");

    if (inst.reg.lower.size() != d || inst.reg.upper.size() != d) {
        report.push_back("box bound length mismatch");
    } else {
        for (Index i = 0; i < d; ++i)
            if (inst.reg.lower[i] > inst.reg.upper[i]) {
                report.push_back("box has lower > upper");
                break;
            }
    }
    if (inst.reg.lambda < 0.0) report.push_back("negative l1 weight");

    const Index n = inst.affine.rows();
    if (n > 0 && inst.affine.A.cols() != d)
        report.push_back("affine width mismatch");
    if (inst.affine.b.size() != n)
        report.push_back("affine right-hand side length mismatch");
    if (inst.affine.ata_norm < 0.0) report.push_back("negative cached operator norm");

    // Probe the oracles at a point of the domain.
    Vector probe = Vector::Zero(d);
    if (inst.reg.lower.size() == d) {
        for (Index i = 0; i < d; ++i) {
            const double lo = inst.reg.lower[i], hi = inst.reg.upper[i];
            if (std::isfinite(lo) && std::isfinite(hi)) probe[i] = 0.5 * (lo + hi);
            else if (std::isfinite(lo)) probe[i] = lo + 1.0;
            else if (std::isfinite(hi)) probe[i] = hi - 1.0;
        }
    }

    if (inst.ineq.m > 0) {
        if (!inst.ineq.oracle) {
            report.push_back("missing inequality oracle");
        } else {
            try {
                auto [g, J] = inst.ineq.oracle(probe);
                if (g.size() != inst.ineq.m) report.push_back("inequality value size mismatch");
                if (J.rows() != inst.ineq.m || J.cols() != d)
                    report.push_back("inequality Jacobian shape mismatch");
            } catch (const std::exception& e) {
                report.push_back(std::string("inequality oracle failed: ") + e.what());
            }
        }
        if (!(inst.ineq.smoothness >= 0.0)) report.push_back("inequality smoothness bound invalid");
        if (!(inst.ineq.value_grad_bound > 0.0) || !std::isfinite(inst.ineq.value_grad_bound))
            report.push_back("inequality value/gradient bound invalid");
    }

    std::visit(
        [&](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, SmoothF>) {
                if (!f.value || !f.gradient) report.push_back("missing smooth objective oracle");
                if (!(f.lipschitz > 0.0) || !std::isfinite(f.lipschitz))
                    report.push_back("smooth objective Lipschitz bound invalid");
                else if (f.gradient) {
                    try {
                        Vector grad = f.gradient(probe);
                        if (grad.size() != d) report.push_back("objective gradient size mismatch");
                    } catch (const std::exception& e) {
                        report.push_back(std::string("objective oracle failed: ") + e.what());
                    }
                }
            } else if constexpr (std::is_same_v<T, CompositeF>) {
                if (!f.inner_value || !f.inner_jacobian)
                    report.push_back("missing composite inner oracle");
                if (f.inner_dim <= 0) report.push_back("composite inner dimension invalid");
                if (!(f.outer_lipschitz > 0.0) || !std::isfinite(f.outer_lipschitz))
                    report.push_back("composite outer Lipschitz bound invalid");
                if (!(f.inner_smoothness > 0.0) || !std::isfinite(f.inner_smoothness))
                    report.push_back("composite inner smoothness bound invalid");
                if (inst.rho > f.outer_lipschitz * f.inner_smoothness * (1.0 + 1e-9))
                    report.push_back("declared rho exceeds the composite surrogate M_l*L_c");
                if (f.inner_value && f.inner_jacobian) {
                    try {
                        Vector c = f.inner_value(probe);
                        Matrix J = f.inner_jacobian(probe);
                        if (c.size() != f.inner_dim || J.rows() != f.inner_dim || J.cols() != d)
                            report.push_back("composite oracle shape mismatch");
                    } catch (const std::exception& e) {
                        report.push_back(std::string("objective oracle failed: ") + e.what());
                    }
                }
            } else {
                if (!f.value || !f.subgradient) report.push_back("missing subgradient oracle");
                if (!(f.subgradient_bound > 0.0) || !std::isfinite(f.subgradient_bound))
                    report.push_back("subgradient bound invalid");
            }
        },
        inst.objective);

    if (inst.x_feas) {
        const Vector& xf = *inst.x_feas;
        if (xf.size() != d) {
            report.push_back("feasible point dimension mismatch");
        } else {
            if (n > 0 && inst.affine.A.cols() == d &&
                (inst.affine.A * xf - inst.affine.b).norm() > 1e-10)
                report.push_back("Slater point violates affine constraints");
            if (inst.reg.lower.size() == d) {
                for (Index i = 0; i < d; ++i)
                    if (xf[i] <= inst.reg.lower[i] || xf[i] >= inst.reg.upper[i]) {
                        report.push_back("Slater point not interior to the box");
                        break;
                    }
            }
            if (inst.ineq.m > 0 && inst.ineq.oracle) {
                try {
                    auto [g, J] = inst.ineq.oracle(xf);
                    (void)J;
                    if ((g.array() >= 0.0).any()) report.push_back("Slater point not strict");
                } catch (const std::exception& e) {
                    report.push_back(std::string("inequality oracle failed: ") + e.what());
                }
            }
        }
    }

    return report;
}

} // namespace dpalm
