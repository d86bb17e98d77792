#include "dynphase/iteration_regular.hpp"

#include <algorithm>
#include <cmath>
#include <bit>
#include <cstdint>

#include <Eigen/LU>

#include "dynphase/linalg.hpp"
#include "dynphase/spark.hpp"

namespace dynphase {

namespace {

constexpr int kMaxMinPolyDegree = 15;
constexpr int kMaxDimension = 24;
constexpr int kLaplaceMinK = 6;
constexpr double kWorkBudget = 6e10;

// Two-stage singularity decision: determinant values only screen candidates;
// the verdict comes from the equilibrated sigma_min/sigma_max against the
// double-precision noise floor. Arithmetic-progression exponent subsets are
// decided in closed form instead (see full_spark notes below). The
// shared-minor scan screens at its own noise floor: an exactly singular
// submatrix computes as pure roundoff, while nonsingular minors spread
// log-normally and would flood a looser screen at large sizes.
constexpr double kDirectScreenFactor = 1e-4;
constexpr double kMinorNoiseFloor = 1e-12;
constexpr double kConfirmRatio = 1e-12;
constexpr double kSquareCoincidenceTol = 1e-10;

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 0; i < k; ++i) r = r * static_cast<double>(n - i) / static_cast<double>(i + 1);
    return r;
}

/// Multiplicity vectors (m_1..m_d) with 0 <= m_s <= cap_s and sum k, visited
/// in decreasing lexicographic order starting from the greedy left-heavy
/// fill. The first violation found in this order is the canonical witness.
class MultisetEnumerator {
  public:
    MultisetEnumerator(std::vector<int> caps, int k) : caps_(std::move(caps)), k_(k) {}

    bool first(std::vector<int>& m) {
        m.assign(caps_.size(), 0);
        return fill_suffix(m, 0, k_);
    }

    bool next(std::vector<int>& m) {
        const int d = static_cast<int>(caps_.size());
        int suffix_sum = 0;
        int suffix_cap = 0;
        for (int i = d - 2; i >= 0; --i) {
            suffix_sum += m[static_cast<size_t>(i + 1)];
            suffix_cap += caps_[static_cast<size_t>(i + 1)];
            if (m[static_cast<size_t>(i)] > 0 && suffix_cap >= suffix_sum + 1) {
                --m[static_cast<size_t>(i)];
                fill_suffix(m, i + 1, suffix_sum + 1);
                return true;
            }
        }
        return false;
    }

  private:
    bool fill_suffix(std::vector<int>& m, int from, int amount) {
        const int d = static_cast<int>(caps_.size());
        for (int i = from; i < d; ++i) {
            const int take = std::min(amount, caps_[static_cast<size_t>(i)]);
            m[static_cast<size_t>(i)] = take;
            amount -= take;
        }
        return amount == 0;
    }

    std::vector<int> caps_;
    int k_;
};

/// Rows of the k x (2k-1) confluent power matrix for a root multiset:
/// derivative order rho at lambda contributes l(l-1)...(l-rho+1) lambda^{l-rho}.
CMat confluent_power_matrix(const CVec& eigenvalues, const std::vector<int>& multiplicity, int k) {
    const int cols = 2 * k - 1;
    CMat m(k, cols);
    std::vector<Complex> powers(static_cast<size_t>(cols));
    int row = 0;
    for (Index s = 0; s < eigenvalues.size(); ++s) {
        const int mult = multiplicity[static_cast<size_t>(s)];
        if (mult == 0) continue;
        const Complex lambda = eigenvalues(s);
        powers[0] = Complex(1.0);
        for (int l = 1; l < cols; ++l) powers[static_cast<size_t>(l)] = powers[static_cast<size_t>(l - 1)] * lambda;
        for (int rho = 0; rho < mult; ++rho, ++row) {
            for (int l = 0; l < cols; ++l) {
                if (l < rho) {
                    m(row, l) = Complex(0.0);
                } else {
                    double fall = 1.0;
                    for (int i = 0; i < rho; ++i) fall *= static_cast<double>(l - i);
                    m(row, l) = fall * powers[static_cast<size_t>(l - rho)];
                }
            }
        }
    }
    return m;
}

struct SubsetSearchResult {
    bool violation = false;
    std::vector<int> exponents;  // lexicographically least offending subset
};

/// The only length-k arithmetic progressions inside {0..2k-2} have step 1 or
/// 2, and both admit closed-form singularity rules: consecutive exponents
/// give a (confluent) Vandermonde, nonsingular for distinct roots; step-2
/// exponents give a Vandermonde in the squared roots, singular exactly when
/// two roots are antipodal. Thresholds never decide these patterns — their
/// conditioning can collapse numerically even though the determinant is
/// provably nonzero.
bool is_arith_progression(const std::vector<int>& t, int step) {
    for (size_t i = 1; i < t.size(); ++i)
        if (t[i] - t[i - 1] != step) return false;
    return true;
}

/// Exact rule for step-2 progressions: singular iff two active roots share a
/// square.
bool squares_coincide(const CVec& eigenvalues, const std::vector<int>& multiplicity) {
    std::vector<Complex> active;
    for (Index s = 0; s < eigenvalues.size(); ++s)
        if (multiplicity[static_cast<size_t>(s)] > 0) active.push_back(eigenvalues(s));
    for (size_t i = 0; i < active.size(); ++i)
        for (size_t j = i + 1; j < active.size(); ++j) {
            const Complex a = active[i] * active[i];
            const Complex b = active[j] * active[j];
            if (std::abs(a - b) <= kSquareCoincidenceTol * std::max({1.0, std::abs(a), std::abs(b)}))
                return true;
        }
    return false;
}

bool submatrix_singular(const CMat& m, const std::vector<int>& t, const CVec& eigenvalues,
                        const std::vector<int>& multiplicity) {
    if (is_arith_progression(t, 1)) return false;
    if (is_arith_progression(t, 2)) return squares_coincide(eigenvalues, multiplicity);
    const int k = static_cast<int>(t.size());
    CMat sub(k, k);
    for (int j = 0; j < k; ++j) sub.col(j) = m.col(t[static_cast<size_t>(j)]);
    return equilibrated_singular_ratio(sub) <= kConfirmRatio;
}

/// Per-subset normalized determinants screen the family (fixed roots,
/// varying exponents) against its best member; screened candidates are
/// settled by submatrix_singular. When shift_reduced is set only subsets
/// containing exponent 0 are visited: for unit-modulus roots a shift of the
/// exponent set scales the determinant by the product of the roots, so every
/// subset is equivalent to one anchored at 0 and the anchored offender is
/// the lexicographically least of its class.
SubsetSearchResult full_spark_direct(const CMat& m, int k, const CVec& eigenvalues,
                                     const std::vector<int>& multiplicity,
                                     bool shift_reduced) {
    const int cols = static_cast<int>(m.cols());
    std::vector<std::vector<int>> subsets;
    std::vector<double> ndets;
    std::vector<int> t = first_subset(k);
    double max_ndet = 0.0;
    do {
        if (shift_reduced && t[0] != 0) break;  // lex order: subsets without 0 all follow
        CMat sub(k, k);
        for (int j = 0; j < k; ++j) sub.col(j) = m.col(t[static_cast<size_t>(j)]);
        const double nd = normalized_determinant(sub);
        max_ndet = std::max(max_ndet, nd);
        subsets.push_back(t);
        ndets.push_back(nd);
    } while (next_subset(t, cols));

    for (size_t i = 0; i < subsets.size(); ++i) {
        const bool candidate = ndets[i] <= kDirectScreenFactor * max_ndet ||
                               is_arith_progression(subsets[i], 2);
        if (candidate && submatrix_singular(m, subsets[i], eigenvalues, multiplicity))
            return {true, subsets[i]};
    }
    return {false, {}};
}

/// Colexicographic ranking of j-subsets of {0..universe-1}: subset bitmasks
/// in increasing numeric order, with O(1) mask lookup (universe <= 15).
struct SubsetTable {
    std::vector<std::uint32_t> masks;
    std::vector<std::uint32_t> rank_of;

    void build(int universe, int size) {
        masks.clear();
        rank_of.assign(std::size_t{1} << universe, 0);
        if (size > universe) return;
        if (size == 0) {
            masks.push_back(0);
            return;
        }
        std::uint32_t mask = (1u << size) - 1;
        const std::uint32_t limit = 1u << universe;
        while (mask < limit) {
            rank_of[mask] = static_cast<std::uint32_t>(masks.size());
            masks.push_back(mask);
            // Gosper's hack: next bitmask with the same popcount.
            const std::uint32_t c = mask & (0u - mask);
            const std::uint32_t r = mask + c;
            mask = (((r ^ mask) >> 2) / c) | r;
        }
    }
};

/**
 * All maximal minors det M[:,T] over exponent subsets T via the reduction
 * M = A [I | W], W = A^{-1} M[:, k..2k-2]: det M[:,T] = +-det(A) *
 * minor_W([k] \ T1, T2), so the full-spark question becomes "is any minor of
 * W (any size) zero". Minors are built level by level with Laplace expansion
 * along the largest column; under colex ranking the column subsets sharing
 * their largest element form contiguous ranges, so every cofactor term is a
 * contiguous axpy across all smaller-column choices at once.
 *
 * With row_offset = 1 the first W row is excluded, which restricts to T
 * containing exponent 0 (shift-equivalence for unit-modulus roots).
 */
class LaplaceMinorScan {
  public:
    LaplaceMinorScan(const CMat& w, int k, int row_offset)
        : w_(w), k_(k), row_offset_(row_offset) {}

    struct Offender {
        std::uint32_t row_mask = 0;
        std::uint32_t col_mask = 0;
    };

    void run(bool collect, double threshold) {
        offenders_.clear();
        max_abs_ = 1.0;  // empty minor <-> T = {0..k-1}
        min_abs_ = 1.0;
        if (collect && 1.0 <= threshold) offenders_.push_back({0, 0});

        const int rows = k_ - row_offset_;
        const int cols = k_ - 1;
        const auto choose = [](int n, int r) -> size_t {
            return static_cast<size_t>(binom(n, r) + 0.5);
        };

        std::vector<Complex> prev{Complex(1.0)};
        SubsetTable prev_rows;
        prev_rows.build(rows, 0);

        struct Term {
            std::uint32_t prev_rank;
            int row;
            double sign;
        };

        for (int j = 1; j <= std::min(rows, cols); ++j) {
            SubsetTable cur_rows;
            cur_rows.build(rows, j);
            const size_t nr = cur_rows.masks.size();
            const size_t nr_prev = prev_rows.masks.size();
            const size_t nc = choose(cols, j);
            const size_t nc_prev = choose(cols, j - 1);

            std::vector<Term> terms(nr * static_cast<size_t>(j));
            for (size_t r = 0; r < nr; ++r) {
                std::uint32_t mask = cur_rows.masks[r];
                int i = 0;
                while (mask) {
                    const int row = std::countr_zero(mask);
                    mask &= mask - 1;
                    const std::uint32_t reduced = cur_rows.masks[r] & ~(1u << row);
                    terms[r * static_cast<size_t>(j) + static_cast<size_t>(i)] = {
                        prev_rows.rank_of[reduced], row,
                        ((i + j - 1) % 2 == 0) ? 1.0 : -1.0};
                    ++i;
                }
            }

            // Row-major storage: value of minor (row-rank r, col-rank c) at
            // cur[r * nc + c]. Column subsets with largest element cstar
            // occupy the colex range [choose(cstar, j), choose(cstar + 1, j)),
            // and removing cstar maps it onto the prefix of the previous
            // level, preserving order.
            std::vector<Complex> cur(nr * nc, Complex(0.0));
            for (int cstar = j - 1; cstar < cols; ++cstar) {
                const size_t run = choose(cstar, j - 1);
                if (run == 0) continue;
                const size_t dst_off = choose(cstar, j);
                for (size_t r = 0; r < nr; ++r) {
                    // Hand-rolled complex axpy: keeps the hot loop free of
                    // __muldc3 calls and lets it vectorize.
                    double* dst =
                        reinterpret_cast<double*>(cur.data() + r * nc + dst_off);
                    const Term* term = &terms[r * static_cast<size_t>(j)];
                    for (int i = 0; i < j; ++i, ++term) {
                        const Complex coeff =
                            term->sign * w_(term->row + row_offset_, cstar);
                        const double cr = coeff.real();
                        const double ci = coeff.imag();
                        const double* src = reinterpret_cast<const double*>(
                            prev.data() + static_cast<size_t>(term->prev_rank) * nc_prev);
                        for (size_t c = 0; c < run; ++c) {
                            const double sr = src[2 * c];
                            const double si = src[2 * c + 1];
                            dst[2 * c] += cr * sr - ci * si;
                            dst[2 * c + 1] += cr * si + ci * sr;
                        }
                    }
                }
            }

            const double threshold_sq = threshold * threshold;
            double max_sq = max_abs_ * max_abs_;
            double min_sq = min_abs_ * min_abs_;
            for (size_t r = 0; r < nr; ++r) {
                const Complex* row_vals = cur.data() + r * nc;
                for (size_t c = 0; c < nc; ++c) {
                    const double mag_sq = std::norm(row_vals[c]);
                    if (mag_sq > max_sq) max_sq = mag_sq;
                    if (mag_sq < min_sq) min_sq = mag_sq;
                    if (collect && mag_sq <= threshold_sq)
                        offenders_.push_back({cur_rows.masks[r], col_mask_of(c, j, cols)});
                }
            }
            max_abs_ = std::sqrt(max_sq);
            min_abs_ = std::sqrt(min_sq);

            prev = std::move(cur);
            prev_rows = std::move(cur_rows);
        }
    }

    double max_abs() const { return max_abs_; }
    double min_abs() const { return min_abs_; }
    const std::vector<Offender>& offenders() const { return offenders_; }

    std::vector<int> exponents_of(const Offender& o) const {
        std::vector<int> t;
        for (int e = 0; e < k_; ++e) {
            const bool kept_row = e >= row_offset_ && (o.row_mask & (1u << (e - row_offset_)));
            if (!kept_row) t.push_back(e);  // identity column selected
        }
        for (int c = 0; c < k_ - 1; ++c)
            if (o.col_mask & (1u << c)) t.push_back(k_ + c);
        std::sort(t.begin(), t.end());
        return t;
    }

  private:
    /// Inverse of the colex ranking: the subset mask at rank c among
    /// j-subsets of {0..universe-1}.
    static std::uint32_t col_mask_of(size_t rank, int j, int universe) {
        std::uint32_t mask = 0;
        double remaining = static_cast<double>(rank);
        int size = j;
        for (int e = universe - 1; e >= 0 && size > 0; --e) {
            const double below = binom(e, size);
            if (remaining >= below) {
                mask |= (1u << e);
                remaining -= below;
                --size;
            }
        }
        return mask;
    }

    const CMat& w_;
    int k_;
    int row_offset_;
    double max_abs_ = 1.0;
    double min_abs_ = 1.0;
    std::vector<Offender> offenders_;
};

SubsetSearchResult full_spark_laplace(const CMat& m, int k, const CVec& eigenvalues,
                                      const std::vector<int>& multiplicity,
                                      bool shift_reduced) {
    const CMat a = m.leftCols(k);
    Eigen::PartialPivLU<CMat> lu(a);
    const CMat b = m.rightCols(k - 1);
    const CMat w = lu.solve(b);
    // Distrust the reduction when the leading Vandermonde block is too
    // ill-conditioned; per-subset determinants are slower but direct.
    if ((a * w - b).cwiseAbs().maxCoeff() > 1e-7 * (1.0 + b.cwiseAbs().maxCoeff()))
        return full_spark_direct(m, k, eigenvalues, multiplicity, shift_reduced);

    // The step-2 progression is always settled in closed form; the scan only
    // screens the remaining subsets.
    std::vector<std::vector<int>> candidates;
    {
        std::vector<int> even(static_cast<size_t>(k));
        for (int j = 0; j < k; ++j) even[static_cast<size_t>(j)] = 2 * j;
        candidates.push_back(std::move(even));
    }

    LaplaceMinorScan scan(w, k, shift_reduced ? 1 : 0);
    scan.run(false, 0.0);
    if (scan.min_abs() <= kMinorNoiseFloor * scan.max_abs()) {
        scan.run(true, kMinorNoiseFloor * scan.max_abs());
        for (const auto& o : scan.offenders()) candidates.push_back(scan.exponents_of(o));
    }

    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (const auto& t : candidates)
        if (submatrix_singular(m, t, eigenvalues, multiplicity)) return {true, t};
    return {false, {}};
}

Polynomial witness_from_subset(const CMat& m, const std::vector<int>& exponents) {
    const int k = static_cast<int>(exponents.size());
    CMat sub(k, k);
    for (int j = 0; j < k; ++j) sub.col(j) = m.col(exponents[static_cast<size_t>(j)]);
    const CVec kernel = least_singular_vector(sub);
    std::vector<Complex> coeffs(static_cast<size_t>(exponents.back()) + 1, Complex(0.0));
    for (int j = 0; j < k; ++j)
        coeffs[static_cast<size_t>(exponents[static_cast<size_t>(j)])] = kernel(j);
    Polynomial raw{std::move(coeffs)};
    return raw.cleaned(1e-10).monic();
}

bool unit_modulus_spectrum(const CVec& eigenvalues) {
    for (Index i = 0; i < eigenvalues.size(); ++i)
        if (std::abs(std::abs(eigenvalues(i)) - 1.0) > 1e-12) return false;
    return true;
}

/// Index of the conjugate partner per eigenvalue group when the spectrum is
/// conjugation-closed with matching block structure; empty otherwise.
std::vector<int> conjugation_pairing(const std::vector<EigenvalueGroup>& groups) {
    const int d = static_cast<int>(groups.size());
    std::vector<int> pairing(static_cast<size_t>(d), -1);
    for (int s = 0; s < d; ++s) {
        const Complex target = std::conj(groups[static_cast<size_t>(s)].value);
        for (int u = 0; u < d; ++u) {
            if (std::abs(groups[static_cast<size_t>(u)].value - target) <=
                    1e-12 * std::max(1.0, std::abs(target)) &&
                groups[static_cast<size_t>(u)].block_sizes ==
                    groups[static_cast<size_t>(s)].block_sizes) {
                pairing[static_cast<size_t>(s)] = u;
                break;
            }
        }
        if (pairing[static_cast<size_t>(s)] < 0) return {};
    }
    return pairing;
}

/// Bounded-composition counts by dynamic programming.
std::vector<double> composition_counts(const std::vector<int>& caps, int deg) {
    std::vector<double> ways(static_cast<size_t>(deg) + 1, 0.0);
    ways[0] = 1.0;
    for (int cap : caps) {
        std::vector<double> next(ways.size(), 0.0);
        for (size_t k = 0; k < ways.size(); ++k)
            for (int take = 0; take <= cap && take + static_cast<int>(k) <= deg; ++take)
                next[k + static_cast<size_t>(take)] += ways[k];
        ways = std::move(next);
    }
    return ways;
}

double estimate_work(const std::vector<int>& caps, int deg, bool laplace_eligible) {
    const std::vector<double> ways = composition_counts(caps, deg);
    double total = 0.0;
    for (int k = 2; k <= deg; ++k) {
        const double nsub = binom(2 * k - 1, k);
        const bool laplace = laplace_eligible && k >= kLaplaceMinK;
        const double per_pair = laplace ? static_cast<double>(k)
                                        : static_cast<double>(k) * k * k / 3.0;
        total += ways[static_cast<size_t>(k)] * nsub * per_pair;
    }
    return total;
}

}  // namespace

bool jordan_cell_regular(Complex lambda, int n) {
    if (n < 1) throw std::invalid_argument("jordan_cell_regular: n must be >= 1");
    return std::abs(lambda) > 0.0;
}

IterationRegularity iteration_regular(const OperatorSpec& spec, const Tolerance& tol) {
    tol.validate();
    const auto& groups = spec.eigenvalue_groups();
    const int d = static_cast<int>(groups.size());

    std::vector<int> caps(static_cast<size_t>(d));
    int deg = 0;
    bool all_simple = true;
    for (int s = 0; s < d; ++s) {
        caps[static_cast<size_t>(s)] = groups[static_cast<size_t>(s)].largest_block();
        deg += caps[static_cast<size_t>(s)];
        if (caps[static_cast<size_t>(s)] > 1) all_simple = false;
    }
    CVec eigenvalues(d);
    for (int s = 0; s < d; ++s) eigenvalues(s) = groups[static_cast<size_t>(s)].value;
    const bool unit_modulus = unit_modulus_spectrum(eigenvalues);

    if (spec.n() > kMaxDimension)
        throw EnumerationLimit("iteration_regular: dimension above desk-scale cap 24");
    if (deg > kMaxMinPolyDegree)
        throw EnumerationLimit("iteration_regular: minimal-polynomial degree above cap 15");
    if (estimate_work(caps, deg, all_simple && unit_modulus) > kWorkBudget)
        throw EnumerationLimit("iteration_regular: enumeration exceeds the work budget");

    // k = 1: only q(x) = c x can violate, so the test is invertibility.
    for (int s = 0; s < d; ++s) {
        if (std::abs(eigenvalues(s)) <= tol.singularity_tol) {
            IterationRegularity res;
            res.regular = false;
            res.witness = Polynomial::monomial(1);
            res.witness_k = 1;
            res.witness_roots = {eigenvalues(s)};
            return res;
        }
    }

    const std::vector<int> conj_pair = conjugation_pairing(groups);

    for (int k = 2; k <= deg; ++k) {
        MultisetEnumerator enumerator(caps, k);
        std::vector<int> mult;
        if (!enumerator.first(mult)) continue;
        do {
            // Conjugate root multisets share verdicts (the submatrices are
            // entrywise conjugate); process only the earlier of each pair.
            if (!conj_pair.empty()) {
                std::vector<int> conj_mult(mult.size());
                for (int s = 0; s < d; ++s)
                    conj_mult[static_cast<size_t>(conj_pair[static_cast<size_t>(s)])] =
                        mult[static_cast<size_t>(s)];
                if (conj_mult > mult) continue;
            }

            bool simple = true;
            for (int v : mult)
                if (v > 1) simple = false;
            const bool shift_reduced = unit_modulus && simple;

            // The shared-minor scan compares raw determinants, which matches
            // the normalized screening only when the row norms are constant
            // across exponent subsets, i.e. for unit-modulus roots.
            const CMat m = confluent_power_matrix(eigenvalues, mult, k);
            const SubsetSearchResult search =
                (simple && unit_modulus && k >= kLaplaceMinK)
                    ? full_spark_laplace(m, k, eigenvalues, mult, shift_reduced)
                    : full_spark_direct(m, k, eigenvalues, mult, shift_reduced);
            if (search.violation) {
                IterationRegularity res;
                res.regular = false;
                res.witness = witness_from_subset(m, search.exponents);
                res.witness_k = k;
                for (int s = 0; s < d; ++s)
                    for (int c = 0; c < mult[static_cast<size_t>(s)]; ++c)
                        res.witness_roots.push_back(eigenvalues(s));
                return res;
            }
        } while (enumerator.next(mult));
    }

    IterationRegularity res;
    res.regular = true;
    return res;
}

}  // namespace dynphase
