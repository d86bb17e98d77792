#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dynphase/operator_spec.hpp"
#include "dynphase/types.hpp"

namespace dynphase {

/// Sampling functionals phi_i, all nonzero, with optional per-index time
/// budgets.
struct FunctionalSet {
    std::vector<Vec> vectors;
    std::vector<int> time_budgets;  // empty or one entry per functional

    void validate(Index n) const;
};

enum class PartitionVerdict { Holds, Fails, BudgetExceeded };

/// A bipartition by original index, reported when the tested property fails.
struct PartitionWitness {
    std::vector<int> first;
    std::vector<int> second;
};

struct ComplementPropertyResult {
    PartitionVerdict verdict = PartitionVerdict::BudgetExceeded;
    std::optional<PartitionWitness> witness;

    bool holds() const { return verdict == PartitionVerdict::Holds; }
};

/// Exhaustive bipartition search budget (node count); partitions are pruned
/// once one side spans, so healthy families stay far below it.
constexpr long kDefaultPartitionBudget = 4'000'000;

/// Every bipartition F = F1 u F2 must leave one side spanning R^n. m <= 24
/// is enforced before enumeration (complement symmetry halves it). The
/// witness is the lexicographically least failing assignment with f_0 kept
/// in F1.
ComplementPropertyResult complement_property(const std::vector<Vec>& f, const Tolerance& tol,
                                             long budget = kDefaultPartitionBudget);

struct PhaselessReconstructionResult {
    PartitionVerdict verdict = PartitionVerdict::BudgetExceeded;
    std::optional<PartitionWitness> witness;
    /// On failure, two distinct signals x1 + x2 and x1 - x2 (not sign-related)
    /// sharing every unsigned measurement.
    std::optional<std::pair<Vec, Vec>> ambiguity;
    double ambiguity_mismatch = 0.0;

    bool holds() const { return verdict == PartitionVerdict::Holds; }
};

/// Same verdict as complement_property (real Hilbert space); a failing
/// partition additionally yields the indistinguishable pair built from the
/// orthogonal complements of the two sides.
PhaselessReconstructionResult does_phaseless_reconstruction(const std::vector<Vec>& f,
                                                            const Tolerance& tol,
                                                            long budget = kDefaultPartitionBudget);

/// For every partition of the index set, one cell's projections must span
/// every penthouse range E_j (ranks over C).
ComplementPropertyResult locally_complementary(const std::vector<CVec>& psi,
                                               const SpectralProfile& profile,
                                               const Tolerance& tol,
                                               long budget = kDefaultPartitionBudget);

enum class CertificateVerdict { Guaranteed, NecessaryConditionFailed, Inconclusive };

std::string to_string(CertificateVerdict v);

/// Packaged outcome of the injectivity analysis for one operator/functional
/// pair, with the quantities the verdict was derived from.
struct Certificate {
    CertificateVerdict verdict = CertificateVerdict::Inconclusive;
    std::string sufficiency_route;  // "power-matrix" or "iteration-regularity"
    std::vector<std::string> reasons;
    std::vector<int> annihilator_degrees;  // r_i per functional
    std::vector<int> time_budgets;         // 2 r_i - 2
    bool locally_complementary = false;
    std::optional<PartitionWitness> lc_witness;
    std::optional<bool> lambda_totally_full_spark;
    std::optional<bool> iteration_regularity;
    int induced_family_size = 0;  // distinct vectors

    bool guaranteed() const { return verdict == CertificateVerdict::Guaranteed; }
};

/**
 * Certificate pipeline: psi_i = B phi_i and r_i from the factorization;
 * failing local complementarity is decisive (necessary condition), while the
 * sufficient direction needs the power matrix of the distinct eigenvalues to
 * have totally full spark (diagonal forms) or the operator to be iteration
 * regular. Anything in between stays INCONCLUSIVE.
 */
Certificate certify(const OperatorSpec& spec, const FunctionalSet& phi, const Tolerance& tol);

/// E = {(A^T)^l phi_i : l = 0..2 r_i - 2}, listed i-major and kept with
/// duplicates; its complement property decides phaseless reconstructability.
std::vector<Vec> induced_vector_family(const OperatorSpec& spec, const FunctionalSet& phi,
                                       const Tolerance& tol);

/// Collapses duplicate vectors (relative distance below tol.rank_tol).
std::vector<Vec> dedup_vectors(const std::vector<Vec>& family, const Tolerance& tol);

}  // namespace dynphase
