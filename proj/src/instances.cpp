#include "dpalm/instances.hpp"

#include <Eigen/QR>
#include <cmath>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace dpalm {

using nlohmann::json;

double spectral_norm(const Matrix& sym, SeededRng& rng, double tol, int max_iters) {
    const Index d = sym.rows();
    if (d == 0) return 0.0;
    Vector v = rng.normal_vector(d);
    v.normalize();
    double lambda = 0.0, residual = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        const Vector w = sym * v;
        lambda = v.dot(w);
        residual = (w - lambda * v).norm();
        // For symmetric matrices the residual bounds the distance to the
        // nearest eigenvalue, so the sum stays above the dominant one.
        if (residual <= tol * std::max(std::abs(lambda), 1e-300))
            return std::abs(lambda) + residual;
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        v = w / norm;
    }
    return std::abs(lambda) + residual;
}

namespace {

// Orthonormal factor of a standard normal matrix, the MATLAB [U,~] = qr(randn(d)).
Matrix random_orthonormal(Index d, SeededRng& rng) {
    const Matrix raw = rng.normal_matrix(d, d);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
    return Matrix(Q);
}

// U diag(max(0, 5 xi)) U^T - shift I with xi standard normal.
Matrix shifted_psd(Index d, double shift, SeededRng& rng) {
    const Matrix U = random_orthonormal(d, rng);
    Vector diag = rng.normal_vector(d);
    for (Index i = 0; i < d; ++i) diag[i] = std::max(0.0, 5.0 * diag[i]);
    Matrix Q = U * diag.asDiagonal() * U.transpose();
    Q.diagonal().array() -= shift;
    return Matrix(0.5 * (Q + Matrix(Q.transpose())));
}

void set_affine(InstanceData& data, Index n, Index d, SeededRng& rng) {
    data.A = Matrix(n, d);
    data.A.leftCols(d - n) = rng.normal_matrix(n, d - n);
    data.A.rightCols(n) = Matrix::Identity(n, n);
    data.b = rng.normal_vector(n).array() + 0.1;
}

void set_box(InstanceData& data, Index d) {
    data.lower = Vector::Constant(d, -5.0);
    data.upper = Vector::Constant(d, 5.0);
}

void record_affine_feasible_point(InstanceData& data) {
    Vector xf = Vector::Zero(data.d);
    xf.tail(data.n) = data.b;
    bool interior = true;
    for (Index i = 0; i < data.d; ++i)
        if (xf[i] <= data.lower[i] || xf[i] >= data.upper[i]) interior = false;
    if (interior) data.x_feas = xf;
}

double max_point_norm(const Vector& lower, const Vector& upper) {
    double sq = 0.0;
    for (Index i = 0; i < lower.size(); ++i)
        sq += std::max(lower[i] * lower[i], upper[i] * upper[i]);
    return std::sqrt(sq);
}

json matrix_to_json(const Matrix& m) {
    json arr = json::array();
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) arr.push_back(m(i, j));
    return arr;
}

Matrix matrix_from_json(const json& arr, Index rows, Index cols) {
    if (static_cast<Index>(arr.size()) != rows * cols)
        throw std::runtime_error("matrix payload size mismatch");
    Matrix m(rows, cols);
    Index k = 0;
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = arr[k++].get<double>();
    return m;
}

json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Vector vector_from_json(const json& arr) {
    Vector v(static_cast<Index>(arr.size()));
    for (Index i = 0; i < v.size(); ++i) v[i] = arr[static_cast<std::size_t>(i)].get<double>();
    return v;
}

} // namespace

ProblemInstance build_instance(const InstanceData& data) {
    auto shared = std::make_shared<const InstanceData>(data);
    ProblemInstance inst;
    inst.dim = shared->d;
    inst.rho = shared->rho;
    inst.reg = make_box(shared->lower, shared->upper);
    inst.x_feas = shared->x_feas;

    if (shared->n > 0) {
        inst.affine.A = shared->A;
        inst.affine.b = shared->b;
        inst.affine.ata_norm = shared->ata_norm;
    }

    if (shared->family == "lcqp" || shared->family == "qcqp") {
        SmoothF f;
        f.value = [shared](const Vector& x) {
            return 0.5 * x.dot(shared->Q0 * x) + shared->c0.dot(x);
        };
        f.gradient = [shared](const Vector& x) { return Vector(shared->Q0 * x + shared->c0); };
        f.lipschitz = shared->L_f;
        inst.objective = std::move(f);
    } else if (shared->family == "rnls") {
        CompositeF f;
        f.outer = OuterKind::L1;
        f.inner_dim = shared->m;
        f.outer_lipschitz = std::sqrt(static_cast<double>(shared->m));
        f.inner_smoothness = shared->L_c;
        f.inner_value = [shared](const Vector& x) {
            Vector out(shared->m);
            for (Index i = 0; i < shared->m; ++i)
                out[i] = 0.5 * x.dot(shared->Q[static_cast<std::size_t>(i)] * x) +
                         shared->c[static_cast<std::size_t>(i)].dot(x);
            return out;
        };
        f.inner_jacobian = [shared](const Vector& x) {
            Matrix J(shared->m, shared->d);
            for (Index i = 0; i < shared->m; ++i)
                J.row(i) = (shared->Q[static_cast<std::size_t>(i)] * x +
                            shared->c[static_cast<std::size_t>(i)])
                               .transpose();
            return J;
        };
        inst.objective = std::move(f);
    } else {
        throw std::invalid_argument("unknown instance family: " + data.family);
    }

    if (shared->family == "qcqp" && shared->m > 0) {
        inst.ineq.m = shared->m;
        inst.ineq.smoothness = shared->L_g;
        inst.ineq.value_grad_bound = shared->B_g;
        inst.ineq.oracle = [shared](const Vector& x) {
            Vector g(shared->m);
            Matrix J(shared->m, shared->d);
            for (Index j = 0; j < shared->m; ++j) {
                const Matrix& Qj = shared->Q[static_cast<std::size_t>(j)];
                const Vector& cj = shared->c[static_cast<std::size_t>(j)];
                const Vector Qx = Qj * x;
                g[j] = 0.5 * x.dot(Qx) + cj.dot(x) - shared->gamma[j];
                J.row(j) = (Qx + cj).transpose();
            }
            return std::make_pair(std::move(g), std::move(J));
        };
    }

    return inst;
}

InstanceData gen_lcqp_data(Index n, Index d, double rho_wc, std::uint64_t seed) {
    if (!(n > 0 && n < d)) throw std::invalid_argument("lcqp requires 0 < n < d");
    if (!(rho_wc > 0.0)) throw std::invalid_argument("weak-convexity constant must be positive");
    SeededRng rng(seed);
    InstanceData data;
    data.family = "lcqp";
    data.seed = seed;
    data.rho = rho_wc;
    data.d = d;
    data.n = n;
    data.m = 0;

    // Draw order: affine block, objective vector, objective quadratic,
    // then power-iteration start vectors.
    set_affine(data, n, d, rng);
    data.c0 = rng.normal_vector(d);
    data.Q0 = shifted_psd(d, rho_wc, rng);
    set_box(data, d);
    data.L_f = spectral_norm(data.Q0, rng, data.power_tol);
    data.ata_norm = spectral_norm(Matrix(data.A * data.A.transpose()), rng, data.power_tol);
    record_affine_feasible_point(data);
    return data;
}

InstanceData gen_qcqp_data(Index m, Index d, double rho_wc, std::uint64_t seed) {
    if (!(d > 5)) throw std::invalid_argument("qcqp requires d > 5");
    if (!(m > 0)) throw std::invalid_argument("qcqp requires at least one constraint");
    if (!(rho_wc > 0.0)) throw std::invalid_argument("weak-convexity constant must be positive");
    SeededRng rng(seed);
    InstanceData data;
    data.family = "qcqp";
    data.seed = seed;
    data.rho = rho_wc;
    data.d = d;
    data.n = 0;
    data.m = m;

    // Draw order: objective vector, objective quadratic, then per constraint
    // (orthonormal factor, eigenvalues, linear term, offset).
    data.c0 = rng.normal_vector(d);
    data.Q0 = shifted_psd(d, rho_wc, rng);
    data.gamma = Vector(m);
    for (Index j = 0; j < m; ++j) {
        const Matrix U = random_orthonormal(d, rng).leftCols(d - 5);
        const Vector eigs = rng.uniform_vector(d - 5, 1.0, 6.0);
        Matrix Qj = U * eigs.asDiagonal() * U.transpose();
        data.Q.push_back(Matrix(0.5 * (Qj + Matrix(Qj.transpose()))));
        data.c.push_back(rng.normal_vector(d));
        data.gamma[j] = std::max(0.0, rng.normal() * 2.0) + 0.1;
    }
    set_box(data, d);
    data.L_f = spectral_norm(data.Q0, rng, data.power_tol);

    const double radius = max_point_norm(data.lower, data.upper);
    double lg = 0.0, bg = 0.0;
    for (Index j = 0; j < m; ++j) {
        const double qnorm = spectral_norm(data.Q[static_cast<std::size_t>(j)], rng,
                                           data.power_tol);
        const double cnorm = data.c[static_cast<std::size_t>(j)].norm();
        lg = std::max(lg, qnorm);
        const double grad_bound = qnorm * radius + cnorm;
        const double value_bound =
            0.5 * qnorm * radius * radius + cnorm * radius + std::abs(data.gamma[j]);
        bg = std::max({bg, grad_bound, value_bound});
    }
    data.L_g = lg;
    data.B_g = bg;
    data.x_feas = Vector::Zero(d); // Slater point: g_j(0) = -gamma_j < 0
    return data;
}

InstanceData gen_rnls_data(Index m, Index n, Index d, std::uint64_t seed) {
    if (!(n > 0 && n < d)) throw std::invalid_argument("rnls requires 0 < n < d");
    if (!(m > 0)) throw std::invalid_argument("rnls requires at least one residual");
    SeededRng rng(seed);
    InstanceData data;
    data.family = "rnls";
    data.seed = seed;
    data.d = d;
    data.n = n;
    data.m = m;

    // Draw order: affine block, then per residual (quadratic, linear term).
    set_affine(data, n, d, rng);
    for (Index i = 0; i < m; ++i) {
        data.Q.push_back(shifted_psd(d, 1.0, rng));
        data.c.push_back(rng.normal_vector(d));
    }
    set_box(data, d);
    double lc = 0.0;
    for (Index i = 0; i < m; ++i)
        lc = std::max(lc, spectral_norm(data.Q[static_cast<std::size_t>(i)], rng,
                                        data.power_tol));
    data.L_c = lc;
    data.rho = std::sqrt(static_cast<double>(m)) * lc; // M_l L_c with M_l = sqrt(m)
    data.ata_norm = spectral_norm(Matrix(data.A * data.A.transpose()), rng, data.power_tol);
    record_affine_feasible_point(data);
    return data;
}

ProblemInstance gen_lcqp(Index n, Index d, double rho_wc, std::uint64_t seed) {
    return build_instance(gen_lcqp_data(n, d, rho_wc, seed));
}

ProblemInstance gen_qcqp(Index m, Index d, double rho_wc, std::uint64_t seed) {
    return build_instance(gen_qcqp_data(m, d, rho_wc, seed));
}

ProblemInstance gen_rnls(Index m, Index n, Index d, std::uint64_t seed) {
    return build_instance(gen_rnls_data(m, n, d, seed));
}

json instance_to_json(const InstanceData& data) {
    json j;
    j["kind"] = data.family;
    j["seed"] = data.seed;
    j["rho"] = data.rho;
    j["dims"] = {{"d", data.d}, {"n", data.n}, {"m", data.m}};
    j["box"] = {{"lower", vector_to_json(data.lower)}, {"upper", vector_to_json(data.upper)}};
    j["meta"] = {{"L_f", data.L_f},       {"L_g", data.L_g},         {"B_g", data.B_g},
                 {"L_c", data.L_c},       {"ata_norm", data.ata_norm},
                 {"power_tol", data.power_tol}};
    if (data.Q0.size() > 0) {
        j["objective"] = {{"Q0", matrix_to_json(data.Q0)}, {"c0", vector_to_json(data.c0)}};
    }
    if (data.n > 0) j["affine"] = {{"A", matrix_to_json(data.A)}, {"b", vector_to_json(data.b)}};
    if (!data.Q.empty()) {
        json qs = json::array();
        json cs = json::array();
        for (std::size_t i = 0; i < data.Q.size(); ++i) {
            qs.push_back(matrix_to_json(data.Q[i]));
            cs.push_back(vector_to_json(data.c[i]));
        }
        j["blocks"] = {{"Q", qs}, {"c", cs}};
        if (data.gamma.size() > 0) j["blocks"]["gamma"] = vector_to_json(data.gamma);
    }
    if (data.x_feas) j["x_feas"] = vector_to_json(*data.x_feas);
    return j;
}

InstanceData instance_from_json(const json& j) {
    InstanceData data;
    data.family = j.at("kind").get<std::string>();
    data.seed = j.at("seed").get<std::uint64_t>();
    data.rho = j.at("rho").get<double>();
    data.d = j.at("dims").at("d").get<Index>();
    data.n = j.at("dims").at("n").get<Index>();
    data.m = j.at("dims").at("m").get<Index>();
    data.lower = vector_from_json(j.at("box").at("lower"));
    data.upper = vector_from_json(j.at("box").at("upper"));
    const auto& meta = j.at("meta");
    data.L_f = meta.at("L_f").get<double>();
    data.L_g = meta.at("L_g").get<double>();
    data.B_g = meta.at("B_g").get<double>();
    data.L_c = meta.at("L_c").get<double>();
    data.ata_norm = meta.at("ata_norm").get<double>();
    data.power_tol = meta.at("power_tol").get<double>();
    if (j.contains("objective")) {
        data.Q0 = matrix_from_json(j.at("objective").at("Q0"), data.d, data.d);
        data.c0 = vector_from_json(j.at("objective").at("c0"));
    }
    if (j.contains("affine")) {
        data.A = matrix_from_json(j.at("affine").at("A"), data.n, data.d);
        data.b = vector_from_json(j.at("affine").at("b"));
    }
    if (j.contains("blocks")) {
        const auto& blocks = j.at("blocks");
        for (const auto& q : blocks.at("Q")) data.Q.push_back(matrix_from_json(q, data.d, data.d));
        for (const auto& c : blocks.at("c")) data.c.push_back(vector_from_json(c));
        if (blocks.contains("gamma")) data.gamma = vector_from_json(blocks.at("gamma"));
    }
    if (j.contains("x_feas")) data.x_feas = vector_from_json(j.at("x_feas"));
    return data;
}

void save_instance(const InstanceData& data, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << instance_to_json(data).dump();
    if (!out) throw std::runtime_error("write failed: " + path);
}

InstanceData load_instance(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    json j;
    in >> j;
    return instance_from_json(j);
}

} // namespace dpalm
