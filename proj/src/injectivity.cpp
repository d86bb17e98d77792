#include "dynphase/injectivity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dynphase/iteration_regular.hpp"
#include "dynphase/linalg.hpp"
#include "dynphase/spark.hpp"

namespace dynphase {

namespace {

constexpr int kMaxPartitionFamily = 24;

/// Incremental orthonormal basis with twice-through Gram-Schmidt; tracks the
/// rank of everything added so far.
class RankTracker {
  public:
    RankTracker(Index dim, double cutoff) : q_(dim, 0), cutoff_(cutoff) {}

    int rank() const { return static_cast<int>(q_.cols()); }

    void add(const CVec& v) {
        if (rank() >= q_.rows()) return;
        CVec w = v;
        for (int pass = 0; pass < 2; ++pass)
            if (q_.cols() > 0) w -= q_ * (q_.adjoint() * w);
        const double norm = w.norm();
        if (norm > cutoff_) {
            q_.conservativeResize(Eigen::NoChange, q_.cols() + 1);
            q_.col(q_.cols() - 1) = w / norm;
        }
    }

    /// Rank after also adding the given vectors (does not mutate).
    int rank_with(const std::vector<CVec>& pool, const std::vector<int>& indices) const {
        RankTracker probe(*this);
        for (int i : indices) {
            probe.add(pool[static_cast<size_t>(i)]);
            if (probe.rank() >= probe.q_.rows()) break;
        }
        return probe.rank();
    }

  private:
    CMat q_;
    double cutoff_;
};

/// Side state for the complement-property search: complete when the side
/// spans the whole space.
class SpanState {
  public:
    SpanState(const std::vector<CVec>* pool, Index dim, double cutoff)
        : pool_(pool), dim_(dim), tracker_(dim, cutoff) {}

    void add(int i) { tracker_.add((*pool_)[static_cast<size_t>(i)]); }
    bool complete() const { return tracker_.rank() == dim_; }
    bool feasible(const std::vector<int>& remaining) const {
        return tracker_.rank_with(*pool_, remaining) == dim_;
    }

  private:
    const std::vector<CVec>* pool_;
    Index dim_;
    RankTracker tracker_;
};

/// Side state for local complementarity: complete when every projected
/// family spans its penthouse range.
class LocalSpanState {
  public:
    LocalSpanState(const std::vector<std::vector<CVec>>* projected,
                   const std::vector<Index>* dims, double cutoff)
        : projected_(projected), dims_(dims) {
        trackers_.reserve(dims->size());
        for (Index d : *dims) trackers_.emplace_back(d, cutoff);
    }

    void add(int i) {
        for (size_t j = 0; j < trackers_.size(); ++j)
            trackers_[j].add((*projected_)[j][static_cast<size_t>(i)]);
    }
    bool complete() const {
        for (size_t j = 0; j < trackers_.size(); ++j)
            if (trackers_[j].rank() != (*dims_)[j]) return false;
        return true;
    }
    bool feasible(const std::vector<int>& remaining) const {
        for (size_t j = 0; j < trackers_.size(); ++j)
            if (trackers_[j].rank_with((*projected_)[j], remaining) != (*dims_)[j]) return false;
        return true;
    }

  private:
    const std::vector<std::vector<CVec>>* projected_;
    const std::vector<Index>* dims_;
    std::vector<RankTracker> trackers_;
};

/// Depth-first bipartition search with span pruning. Assigning to the first
/// side first makes the reported witness the lexicographically least failing
/// assignment (index 0 pinned to the first side by complement symmetry).
template <class State>
class PartitionSearch {
  public:
    PartitionSearch(int count, State initial, long budget)
        : count_(count), budget_(budget), side1_(initial), side2_(std::move(initial)) {}

    ComplementPropertyResult run() {
        assigned1_.clear();
        assigned2_.clear();
        if (count_ == 0) return {PartitionVerdict::Holds, std::nullopt};
        side1_.add(0);
        assigned1_.push_back(0);
        const PartitionVerdict v = dfs(1, side1_, side2_);
        ComplementPropertyResult res;
        res.verdict = v;
        if (v == PartitionVerdict::Fails) res.witness = PartitionWitness{witness1_, witness2_};
        return res;
    }

  private:
    PartitionVerdict dfs(int next, State& s1, State& s2) {
        if (--budget_ < 0) return PartitionVerdict::BudgetExceeded;
        if (s1.complete() || s2.complete()) return PartitionVerdict::Holds;

        std::vector<int> remaining;
        remaining.reserve(static_cast<size_t>(count_ - next));
        for (int i = next; i < count_; ++i) remaining.push_back(i);
        const bool f1 = s1.feasible(remaining);
        const bool f2 = s2.feasible(remaining);
        if (!f1 && !f2) {
            // Every completion fails; the least one sends the rest to side 1.
            witness1_ = assigned1_;
            witness1_.insert(witness1_.end(), remaining.begin(), remaining.end());
            witness2_ = assigned2_;
            return PartitionVerdict::Fails;
        }
        if (next == count_) {
            witness1_ = assigned1_;
            witness2_ = assigned2_;
            return PartitionVerdict::Fails;
        }

        bool exceeded = false;
        {
            State child = s1;
            child.add(next);
            assigned1_.push_back(next);
            const PartitionVerdict v = dfs(next + 1, child, s2);
            assigned1_.pop_back();
            if (v == PartitionVerdict::Fails) return v;
            if (v == PartitionVerdict::BudgetExceeded) exceeded = true;
        }
        {
            State child = s2;
            child.add(next);
            assigned2_.push_back(next);
            const PartitionVerdict v = dfs(next + 1, s1, child);
            assigned2_.pop_back();
            if (v == PartitionVerdict::Fails) return v;
            if (v == PartitionVerdict::BudgetExceeded) exceeded = true;
        }
        return exceeded ? PartitionVerdict::BudgetExceeded : PartitionVerdict::Holds;
    }

    int count_;
    long budget_;
    State side1_;
    State side2_;
    std::vector<int> assigned1_;
    std::vector<int> assigned2_;
    std::vector<int> witness1_;
    std::vector<int> witness2_;
};

std::vector<CVec> normalized_complex(const std::vector<Vec>& f) {
    std::vector<CVec> pool;
    pool.reserve(f.size());
    for (const auto& v : f) {
        const double norm = v.norm();
        pool.push_back((norm > 0.0 ? Vec(v / norm) : v).cast<Complex>());
    }
    return pool;
}

}  // namespace

void FunctionalSet::validate(Index n) const {
    if (vectors.empty()) throw std::invalid_argument("FunctionalSet: empty index set");
    if (!time_budgets.empty() && time_budgets.size() != vectors.size())
        throw std::invalid_argument("FunctionalSet: time budget per functional expected");
    for (const auto& v : vectors) {
        if (v.size() != n) throw std::invalid_argument("FunctionalSet: dimension mismatch");
        if (v.norm() == 0.0) throw std::invalid_argument("FunctionalSet: zero functional");
    }
}

ComplementPropertyResult complement_property(const std::vector<Vec>& f, const Tolerance& tol,
                                             long budget) {
    tol.validate();
    if (f.empty()) throw std::invalid_argument("complement_property: empty family");
    if (f.size() > kMaxPartitionFamily)
        throw EnumerationLimit("complement_property: more than 24 vectors");
    const Index n = f.front().size();
    for (const auto& v : f)
        if (v.size() != n) throw std::invalid_argument("complement_property: dimension mismatch");

    const std::vector<CVec> pool = normalized_complex(f);
    SpanState initial(&pool, n, tol.rank_tol);
    PartitionSearch<SpanState> search(static_cast<int>(f.size()), initial, budget);
    return search.run();
}

PhaselessReconstructionResult does_phaseless_reconstruction(const std::vector<Vec>& f,
                                                            const Tolerance& tol, long budget) {
    const ComplementPropertyResult cp = complement_property(f, tol, budget);
    PhaselessReconstructionResult res;
    res.verdict = cp.verdict;
    res.witness = cp.witness;
    if (cp.verdict != PartitionVerdict::Fails) return res;

    // From the witness partition, x_l orthogonal to side l gives signals
    // x1 + x2 and x1 - x2 with identical unsigned measurements.
    const Index n = f.front().size();
    Mat side1(n, static_cast<Index>(cp.witness->first.size()));
    for (size_t j = 0; j < cp.witness->first.size(); ++j)
        side1.col(static_cast<Index>(j)) = f[static_cast<size_t>(cp.witness->first[j])];
    Mat side2(n, static_cast<Index>(cp.witness->second.size()));
    for (size_t j = 0; j < cp.witness->second.size(); ++j)
        side2.col(static_cast<Index>(j)) = f[static_cast<size_t>(cp.witness->second[j])];
    const Vec x1 = orthogonal_complement_vector(side1, tol);
    const Vec x2 = orthogonal_complement_vector(side2, tol);
    const Vec plus = x1 + x2;
    const Vec minus = x1 - x2;
    double mismatch = 0.0;
    for (const auto& v : f)
        mismatch = std::max(mismatch, std::abs(std::abs(plus.dot(v)) - std::abs(minus.dot(v))));
    res.ambiguity = std::make_pair(plus, minus);
    res.ambiguity_mismatch = mismatch;
    return res;
}

ComplementPropertyResult locally_complementary(const std::vector<CVec>& psi,
                                               const SpectralProfile& profile,
                                               const Tolerance& tol, long budget) {
    tol.validate();
    if (psi.empty()) throw std::invalid_argument("locally_complementary: empty family");
    if (psi.size() > kMaxPartitionFamily)
        throw EnumerationLimit("locally_complementary: more than 24 vectors");

    const Index d = profile.count();
    std::vector<std::vector<CVec>> projected(static_cast<size_t>(d));
    std::vector<Index> dims(static_cast<size_t>(d));
    for (Index s = 0; s < d; ++s) {
        dims[static_cast<size_t>(s)] = profile.dim(s);
        auto& slot = projected[static_cast<size_t>(s)];
        slot.reserve(psi.size());
        for (const auto& v : psi) {
            if (v.size() != profile.ambient_dim)
                throw std::invalid_argument("locally_complementary: dimension mismatch");
            CVec p = profile.project(s, v);
            const double norm = p.norm();
            slot.push_back(norm > 0.0 ? CVec(p / norm) : p);
        }
    }

    LocalSpanState initial(&projected, &dims, tol.rank_tol);
    PartitionSearch<LocalSpanState> search(static_cast<int>(psi.size()), initial, budget);
    return search.run();
}

std::string to_string(CertificateVerdict v) {
    switch (v) {
        case CertificateVerdict::Guaranteed: return "GUARANTEED";
        case CertificateVerdict::NecessaryConditionFailed: return "NECESSARY_CONDITION_FAILED";
        case CertificateVerdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "INCONCLUSIVE";
}

std::vector<Vec> induced_vector_family(const OperatorSpec& spec, const FunctionalSet& phi,
                                       const Tolerance& tol) {
    phi.validate(spec.n());
    const Mat at = spec.matrix().transpose();
    std::vector<Vec> family;
    for (const auto& v : phi.vectors) {
        const CVec psi = spec.similarity() * v.cast<Complex>();
        const int r = spec.annihilator_degree(psi, tol);
        Vec current = v;
        family.push_back(current);
        for (int l = 1; l <= 2 * r - 2; ++l) {
            current = at * current;
            family.push_back(current);
        }
    }
    return family;
}

std::vector<Vec> dedup_vectors(const std::vector<Vec>& family, const Tolerance& tol) {
    std::vector<Vec> unique;
    for (const auto& v : family) {
        bool seen = false;
        for (const auto& u : unique) {
            if ((v - u).norm() <= tol.rank_tol * std::max({1.0, v.norm(), u.norm()})) {
                seen = true;
                break;
            }
        }
        if (!seen) unique.push_back(v);
    }
    return unique;
}

Certificate certify(const OperatorSpec& spec, const FunctionalSet& phi, const Tolerance& tol) {
    tol.validate();
    phi.validate(spec.n());

    Certificate cert;
    std::vector<CVec> psi;
    psi.reserve(phi.vectors.size());
    for (const auto& v : phi.vectors) psi.push_back(spec.similarity() * v.cast<Complex>());

    for (const auto& p : psi) {
        const int r = spec.annihilator_degree(p, tol);
        cert.annihilator_degrees.push_back(r);
        cert.time_budgets.push_back(std::max(0, 2 * r - 2));
    }
    cert.induced_family_size =
        static_cast<int>(dedup_vectors(induced_vector_family(spec, phi, tol), tol).size());

    const SpectralProfile profile = spec.spectral_profile();
    const ComplementPropertyResult lc = locally_complementary(psi, profile, tol);
    if (lc.verdict == PartitionVerdict::BudgetExceeded) {
        cert.verdict = CertificateVerdict::Inconclusive;
        cert.reasons.push_back("local complementarity undecided: partition budget exceeded");
        return cert;
    }
    cert.locally_complementary = lc.holds();
    if (!lc.holds()) {
        cert.verdict = CertificateVerdict::NecessaryConditionFailed;
        cert.lc_witness = lc.witness;
        std::ostringstream os;
        os << "local complementarity failed for partition {";
        for (size_t i = 0; i < lc.witness->first.size(); ++i)
            os << (i ? "," : "") << lc.witness->first[i];
        os << "} | {";
        for (size_t i = 0; i < lc.witness->second.size(); ++i)
            os << (i ? "," : "") << lc.witness->second[i];
        os << "}";
        cert.reasons.push_back(os.str());
        return cert;
    }
    cert.reasons.push_back("locally complementary with respect to the penthouse family");

    if (cert.induced_family_size < 2 * static_cast<int>(spec.n()) - 1) {
        std::ostringstream os;
        os << "induced family has " << cert.induced_family_size << " distinct vectors, below the "
           << 2 * spec.n() - 1 << " needed for phaseless reconstruction";
        cert.reasons.push_back(os.str());
    }

    if (spec.is_diagonal_form()) {
        const TotallyFullSparkResult tfs =
            totally_full_spark(profile.lambda_matrix, tol);
        cert.lambda_totally_full_spark = tfs.totally_full_spark;
        if (tfs.totally_full_spark) {
            cert.verdict = CertificateVerdict::Guaranteed;
            cert.sufficiency_route = "power-matrix";
            cert.reasons.push_back("eigenvalue power matrix has totally full spark");
            return cert;
        }
        std::ostringstream os;
        os << "power matrix is not totally full spark (rows {";
        for (size_t i = 0; i < tfs.witness->rows.size(); ++i)
            os << (i ? "," : "") << tfs.witness->rows[i];
        os << "}, cols {";
        for (size_t i = 0; i < tfs.witness->cols.size(); ++i)
            os << (i ? "," : "") << tfs.witness->cols[i];
        os << "})";
        cert.reasons.push_back(os.str());
    }

    try {
        const IterationRegularity reg = iteration_regular(spec, tol);
        cert.iteration_regularity = reg.regular;
        if (reg.regular) {
            cert.verdict = CertificateVerdict::Guaranteed;
            cert.sufficiency_route = "iteration-regularity";
            cert.reasons.push_back("operator is iteration regular");
            return cert;
        }
        cert.reasons.push_back("not iteration regular; witness " + reg.witness->to_string());
    } catch (const EnumerationLimit& e) {
        cert.reasons.push_back(std::string("iteration regularity undecided: ") + e.what());
    }

    cert.verdict = CertificateVerdict::Inconclusive;
    cert.reasons.push_back("sufficiency unverified: the power-matrix condition is not necessary");
    return cert;
}

}  // namespace dynphase
