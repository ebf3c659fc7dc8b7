#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpalm/problem.hpp"
#include "dpalm/rng.hpp"

namespace dpalm {

/// Concrete data behind a generated instance; everything needed to rebuild
/// the oracles and to serialize the instance bit-exactly.
struct InstanceData {
    std::string family; // lcqp | qcqp | rnls
    std::uint64_t seed = 0;
    double rho = 0.0;
    Index d = 0;
    Index n = 0; // affine rows
    Index m = 0; // inequality rows (qcqp) or residual count (rnls)

    Matrix Q0; // quadratic objective (lcqp, qcqp)
    Vector c0;
    std::vector<Matrix> Q; // constraint quadratics (qcqp) or residual quadratics (rnls)
    std::vector<Vector> c;
    Vector gamma; // qcqp offsets
    Matrix A;
    Vector b;
    Vector lower, upper;

    double L_f = 0.0;
    double L_g = 0.0;
    double B_g = 0.0;
    double L_c = 0.0;
    double ata_norm = 0.0;
    double power_tol = 1e-8;
    std::optional<Vector> x_feas;
};

/// Spectral norm of a symmetric matrix by power iteration, to relative
/// tolerance tol; the start vector is drawn from rng.
double spectral_norm(const Matrix& sym, SeededRng& rng, double tol = 1e-8,
                     int max_iters = 20000);

ProblemInstance build_instance(const InstanceData& data);

InstanceData gen_lcqp_data(Index n, Index d, double rho_wc, std::uint64_t seed);
InstanceData gen_qcqp_data(Index m, Index d, double rho_wc, std::uint64_t seed);
InstanceData gen_rnls_data(Index m, Index n, Index d, std::uint64_t seed);

ProblemInstance gen_lcqp(Index n, Index d, double rho_wc, std::uint64_t seed);
ProblemInstance gen_qcqp(Index m, Index d, double rho_wc, std::uint64_t seed);
ProblemInstance gen_rnls(Index m, Index n, Index d, std::uint64_t seed);

nlohmann::json instance_to_json(const InstanceData& data);
InstanceData instance_from_json(const nlohmann::json& j);

void save_instance(const InstanceData& data, const std::string& path);
InstanceData load_instance(const std::string& path);

} // namespace dpalm
