#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dpalm/problem.hpp"

namespace dpalm {

struct Dataset {
    Matrix features; // samples x features
    Vector labels;   // in {-1, +1}
    std::vector<std::uint8_t> protected_mask; // group membership
    std::vector<std::uint8_t> heldout_mask;   // true = D, false = P or U

    Index samples() const { return features.rows(); }
    Index dim() const { return features.cols(); }
};

/// Sparse LIBSVM lines ("label idx:val ...") expanded to dense rows; feature
/// indices are 1-based. n_features = 0 infers the width from the file.
/// Malformed lines and unknown labels raise with the line number.
Dataset load_libsvm(const std::string& path, Index n_features = 0);

/// CSV with a header row; the label column maps {1,+1} -> +1 and {-1,0} -> -1,
/// the group column is nonzero-for-protected, the rest become features.
Dataset load_csv(const std::string& path, const std::string& label_column,
                 const std::string& group_column);

/// Marks samples whose feature value at `feature` is nonzero as protected.
void assign_group_by_feature(Dataset& ds, Index feature);

struct FairnessBuild {
    ProblemInstance inst;
    Vector x_mat;      // minimizer of the held-out loss over the box
    double theta = 0.0;
    double gamma_slack = 0.0;
    double heldout_loss = 0.0;   // L(x_mat; D)
    double g_at_xmat = 0.0;      // constraint value at x_mat
    bool feasible_at_xmat = false;
    std::vector<std::uint8_t> heldout_mask; // the drawn D split
};

/// Builds the group-fairness instance: splits about 1/3 of the samples into
/// the held-out set D, fits x_mat on D over the radius-ball, fixes the
/// threshold theta and slack gamma from it, and assembles the composite
/// objective with the single loss constraint.
FairnessBuild build_fairness(const Dataset& ds, std::uint64_t split_seed,
                             double radius = 0.1, double fit_tol = 1e-8);

} // namespace dpalm
