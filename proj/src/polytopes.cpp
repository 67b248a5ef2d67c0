#include "countdist/polytopes.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <thread>

#include "countdist/counts.hpp"
#include "countdist/errors.hpp"
#include "countdist/scales.hpp"

namespace countdist {

namespace {

using RMat = Mat<Rational>;
using RVec = std::vector<Rational>;

struct Cell {
    int scale;
    int col;
};

Privacy<Rational> privacy_of(const PolytopeDescriptor& desc) {
    return Privacy<Rational>::from_lambda(desc.lambda);
}

bool needs_fixed_point(PolytopeKind k) { return k == PolytopeKind::kF || k == PolytopeKind::kRF; }

void check_descriptor(const PolytopeDescriptor& desc) {
    if (desc.n < 1) throw InputError("polytope descriptor: n must be >= 1");
    if (!(desc.lambda > 1)) throw InputError("polytope descriptor: lambda must be > 1");
    if (needs_fixed_point(desc.kind)) {
        if (desc.z.size() != desc.n) throw InputError("polytope descriptor: z must have length n");
        Rational sum(0);
        for (const auto& v : desc.z.p) {
            if (v < 0) throw InputError("polytope descriptor: z must be nonnegative");
            sum += v;
        }
        if (sum != 1) throw InputError("polytope descriptor: z must sum to exactly 1");
    }
}

/// Mod-p prefilter for the support enumeration. Certifying inconsistency mod
/// a single prime is unsound (a pivotal minor could be divisible by it), so a
/// support is discarded only when the system is inconsistent modulo every one
/// of four distinct 61-bit primes AND the Hadamard bound on the cleared
/// integer minors stays below their product, which makes the certificate
/// exact. Everything else falls through to the rational solve.
class ModPrefilter {
public:
    static std::vector<ModPrefilter> make(const RMat& psi, const RVec& z_psi,
                                          const Distribution<Rational>* z, int max_support) {
        static constexpr uint64_t kPrimes[4] = {2305843009213693951ULL, 2305843009213693921ULL,
                                                2305843009213693907ULL, 2305843009213693723ULL};
        // Hadamard check: with L = lcm of all denominators and E the largest
        // cleared integer entry, any minor of the (m x m+1) integer system is
        // below (sqrt(m) E)^m; require that to clear the prime product.
        mpz_class lcm(1), emax(1);
        auto absorb = [&](const Rational& q) {
            mpz_class l;
            mpz_lcm(l.get_mpz_t(), lcm.get_mpz_t(), q.get_den().get_mpz_t());
            lcm = l;
        };
        std::vector<const RVec*> pools;
        RVec extra;
        extra.push_back(Rational(1));
        if (z) {
            for (const auto& v : z->p) extra.push_back(v);
        }
        for (const auto& v : psi.a) absorb(v);
        for (const auto& v : z_psi) absorb(v);
        for (const auto& v : extra) absorb(v);
        auto absorb_mag = [&](const Rational& q) {
            mpz_class mag = abs(q.get_num() * (lcm / q.get_den()));
            if (mag > emax) emax = mag;
        };
        for (const auto& v : psi.a) absorb_mag(v);
        for (const auto& v : z_psi) absorb_mag(v);
        for (const auto& v : extra) absorb_mag(v);

        const double bits_entry = static_cast<double>(mpz_sizeinbase(emax.get_mpz_t(), 2));
        const double m = static_cast<double>(std::max(1, max_support) + 1);
        const double minor_bits = m * (bits_entry + 0.5 * std::log2(m)) + 4.0;
        const bool lcm_small = mpz_sizeinbase(lcm.get_mpz_t(), 2) < 61;
        if (!lcm_small || minor_bits >= 4.0 * 61.0) return {};

        std::vector<ModPrefilter> filters;
        for (uint64_t p : kPrimes) {
            ModPrefilter f(psi, z_psi, z, p);
            if (!f.usable_) return {};
            filters.push_back(std::move(f));
        }
        return filters;
    }

    /// True iff the support's equality system is inconsistent mod this prime.
    bool inconsistent(const std::vector<Cell>& support, bool fixed_point) const {
        const int m = static_cast<int>(support.size());
        const int num_eq = (fixed_point ? n_ : 0) + n_;
        const int w = m + 1;
        std::vector<uint64_t> scratch(static_cast<size_t>(num_eq) * w, 0);
        uint64_t* a = scratch.data();
        int eq = 0;
        if (fixed_point) {
            for (int j = 0; j < n_; ++j, ++eq) {
                for (int c = 0; c < m; ++c) {
                    if (support[static_cast<size_t>(c)].col == j)
                        a[static_cast<size_t>(eq) * w + c] =
                            z_psi_mod_[static_cast<size_t>(support[static_cast<size_t>(c)].scale)];
                }
                a[static_cast<size_t>(eq) * w + m] = z_mod_[static_cast<size_t>(j)];
            }
        }
        for (int r = 0; r < n_; ++r, ++eq) {
            for (int c = 0; c < m; ++c)
                a[static_cast<size_t>(eq) * w + c] =
                    psi_mod_[static_cast<size_t>(r) * k_ + support[static_cast<size_t>(c)].scale];
            a[static_cast<size_t>(eq) * w + m] = 1;
        }
        int row = 0;
        for (int col = 0; col < m && row < num_eq; ++col) {
            int pivot = -1;
            for (int r = row; r < num_eq; ++r) {
                if (a[static_cast<size_t>(r) * w + col] != 0) {
                    pivot = r;
                    break;
                }
            }
            if (pivot < 0) continue;
            if (pivot != row) {
                for (int j = col; j <= m; ++j)
                    std::swap(a[static_cast<size_t>(pivot) * w + j], a[static_cast<size_t>(row) * w + j]);
            }
            const uint64_t inv = detail::powmod_u64(a[static_cast<size_t>(row) * w + col], p_ - 2, p_);
            for (int r = row + 1; r < num_eq; ++r) {
                const uint64_t f = detail::mulmod_u64(a[static_cast<size_t>(r) * w + col], inv, p_);
                if (f == 0) continue;
                a[static_cast<size_t>(r) * w + col] = 0;
                for (int j = col + 1; j <= m; ++j) {
                    uint64_t& cell = a[static_cast<size_t>(r) * w + j];
                    const uint64_t sub = detail::mulmod_u64(f, a[static_cast<size_t>(row) * w + j], p_);
                    cell = cell >= sub ? cell - sub : cell + p_ - sub;
                }
            }
            ++row;
        }
        for (int r = row; r < num_eq; ++r) {
            if (a[static_cast<size_t>(r) * w + m] != 0) return true;
        }
        return false;
    }

private:
    ModPrefilter(const RMat& psi, const RVec& z_psi, const Distribution<Rational>* z, uint64_t p)
        : p_(p), n_(psi.rows), k_(psi.cols) {
        usable_ = true;
        psi_mod_.resize(psi.a.size());
        for (size_t i = 0; i < psi.a.size(); ++i) usable_ = usable_ && reduce(psi.a[i], psi_mod_[i]);
        z_psi_mod_.resize(z_psi.size());
        for (size_t i = 0; i < z_psi.size(); ++i)
            usable_ = usable_ && reduce(z_psi[i], z_psi_mod_[i]);
        if (z) {
            z_mod_.resize(z->p.size());
            for (size_t i = 0; i < z->p.size(); ++i) usable_ = usable_ && reduce(z->p[i], z_mod_[i]);
        }
    }

    bool reduce(const Rational& q, uint64_t& out) const {
        const uint64_t den = mpz_fdiv_ui(q.get_den().get_mpz_t(), p_);
        if (den == 0) return false;
        const uint64_t num = mpz_fdiv_ui(q.get_num().get_mpz_t(), p_);
        out = detail::mulmod_u64(num, detail::powmod_u64(den, p_ - 2, p_), p_);
        return true;
    }

    uint64_t p_;
    int n_, k_;
    bool usable_ = false;
    std::vector<uint64_t> psi_mod_, z_psi_mod_, z_mod_;
};

/// Solves the R_F / R_U equality system restricted to the given support cells.
/// Returns the filled k x n matrix when the solution is unique and strictly
/// positive on the support.
std::optional<RMat> solve_support(const std::vector<Cell>& support, const RMat& psi,
                                  const RVec& z_psi, const Distribution<Rational>* z, int n) {
    const int m = static_cast<int>(support.size());
    const int num_eq = (z ? n : 0) + n;
    RMat a(num_eq, m);
    RVec b(static_cast<size_t>(num_eq), Rational(0));
    int eq = 0;
    if (z) {
        // One capacity equation per column: sum_i (z Psi_i) b_{i,j} = z_j.
        for (int j = 0; j < n; ++j, ++eq) {
            for (int c = 0; c < m; ++c) {
                if (support[static_cast<size_t>(c)].col == j)
                    a(eq, c) = z_psi[static_cast<size_t>(support[static_cast<size_t>(c)].scale)];
            }
            b[static_cast<size_t>(eq)] = z->p[static_cast<size_t>(j)];
        }
    }
    for (int r = 0; r < n; ++r, ++eq) {  // Psi B 1 = 1, one equation per row
        for (int c = 0; c < m; ++c)
            a(eq, c) = psi(r, support[static_cast<size_t>(c)].scale);
        b[static_cast<size_t>(eq)] = Rational(1);
    }
    bool unique = false;
    auto x = solve_exact(std::move(a), std::move(b), false, &unique);
    if (!x || !unique) return std::nullopt;
    for (const auto& v : *x) {
        if (!(v > 0)) return std::nullopt;  // smaller-support solutions are found elsewhere
    }
    RMat out(psi.cols, n);
    for (int c = 0; c < m; ++c)
        out(support[static_cast<size_t>(c)].scale, support[static_cast<size_t>(c)].col) = (*x)[static_cast<size_t>(c)];
    return out;
}

/// Support enumeration for R_F: per-column nonempty scale subsets for columns
/// in the support of z, pruned to at most |P| + n - 1 total positive entries.
std::vector<RMat> enumerate_rf(int n, const Privacy<Rational>& priv,
                               const Distribution<Rational>& z) {
    const RMat psi = enumerate_scales<Rational>(n, priv);
    const int k = psi.cols;
    const RVec z_psi = vecmat(z.p, psi);
    std::vector<int> positive_cols;
    for (int j = 0; j < n; ++j)
        if (z.p[static_cast<size_t>(j)] > 0) positive_cols.push_back(j);
    const int max_cells = static_cast<int>(positive_cols.size()) + n - 1;

    // Nonempty scale subsets per column, as bitmasks over the k scales,
    // ordered by popcount so the shard round-robin spreads the heavy
    // small-subset subtrees evenly across threads.
    std::vector<uint32_t> masks;
    for (uint32_t mask = 1; mask < (1u << k); ++mask) masks.push_back(mask);
    std::stable_sort(masks.begin(), masks.end(), [](uint32_t a, uint32_t b) {
        return __builtin_popcount(a) < __builtin_popcount(b);
    });

    const auto prefilters = ModPrefilter::make(psi, z_psi, &z, max_cells);

    // The equality system carries one built-in dependency (z against the row
    // sums), so supports of maximal size are generically consistent and the
    // inconsistency prefilter only pays off below that size.
    const int prefilter_below = max_cells;

    struct Worker {
        std::set<RMat> found;
        std::vector<uint32_t> chosen;
        std::vector<Cell> support;
    };

    auto run_shard = [&](Worker& w, size_t shard, size_t num_shards) {
        auto recurse = [&](auto&& self, size_t col_idx, int used) -> void {
            if (col_idx == positive_cols.size()) {
                if (!prefilters.empty() && static_cast<int>(w.support.size()) < prefilter_below) {
                    bool all_inconsistent = true;
                    for (const auto& f : prefilters) {
                        if (!f.inconsistent(w.support, true)) {
                            all_inconsistent = false;
                            break;
                        }
                    }
                    if (all_inconsistent) return;  // certified: no rational solution
                }
                if (auto b = solve_support(w.support, psi, z_psi, &z, n)) {
                    if (!psi_affinely_simplified(*b, z, psi))
                        throw InternalError(
                            "R_F oracle: unique positive support failed the predicate");
                    w.found.insert(std::move(*b));
                }
                return;
            }
            const int remaining_cols = static_cast<int>(positive_cols.size() - col_idx);
            for (size_t mask_idx = 0; mask_idx < masks.size(); ++mask_idx) {
                if (col_idx == 0 && mask_idx % num_shards != shard) continue;
                const uint32_t mask = masks[mask_idx];
                const int bits = __builtin_popcount(mask);
                if (used + bits + (remaining_cols - 1) > max_cells) continue;
                // Two columns with the same multi-scale subset duplicate their
                // difference vectors, so such supports can never be simplified.
                if (bits >= 2) {
                    bool dup = false;
                    for (size_t prev = 0; prev < col_idx; ++prev)
                        if (w.chosen[prev] == mask) dup = true;
                    if (dup) continue;
                }
                w.chosen[col_idx] = mask;
                const size_t base = w.support.size();
                for (int s = 0; s < k; ++s)
                    if (mask & (1u << s)) w.support.push_back({s, positive_cols[col_idx]});
                self(self, col_idx + 1, used + bits);
                w.support.resize(base);
                w.chosen[col_idx] = 0;
            }
        };
        recurse(recurse, 0, 0);
    };

    const size_t num_shards =
        positive_cols.empty() ? 1 : std::max<size_t>(1, std::thread::hardware_concurrency());
    std::vector<Worker> workers(num_shards);
    for (auto& w : workers) w.chosen.assign(positive_cols.size(), 0);
    if (positive_cols.empty()) {
        run_shard(workers[0], 0, 1);
    } else {
        std::vector<std::thread> threads;
        for (size_t shard = 0; shard < num_shards; ++shard)
            threads.emplace_back([&, shard] { run_shard(workers[shard], shard, num_shards); });
        for (auto& t : threads) t.join();
    }
    std::set<RMat> found;
    for (auto& w : workers)
        for (auto& b : w.found) found.insert(std::move(b));
    return {found.begin(), found.end()};
}

/// Support enumeration for R_U: at most one positive entry per scale row and
/// at most n in total. Feasibility depends only on the chosen scale set, so
/// solve once per scale subset and then fan out over column assignments.
std::vector<RMat> enumerate_ru(int n, const Privacy<Rational>& priv) {
    const RMat psi = enumerate_scales<Rational>(n, priv);
    const int k = psi.cols;
    std::set<RMat> found;
    for (uint32_t mask = 1; mask < (1u << k); ++mask) {
        const int bits = __builtin_popcount(mask);
        if (bits > n) continue;
        std::vector<int> scales;
        for (int s = 0; s < k; ++s)
            if (mask & (1u << s)) scales.push_back(s);
        // Row-sum system Psi_R y = 1.
        RMat a(n, bits);
        RVec b(static_cast<size_t>(n), Rational(1));
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < bits; ++c) a(r, c) = psi(r, scales[static_cast<size_t>(c)]);
        bool unique = false;
        auto y = solve_exact(std::move(a), std::move(b), false, &unique);
        if (!y || !unique) continue;
        bool positive = true;
        for (const auto& v : *y)
            if (!(v > 0)) positive = false;
        if (!positive) continue;
        // Every assignment of the chosen scales to columns is a vertex.
        std::vector<int> assign(static_cast<size_t>(bits), 0);
        for (;;) {
            RMat bmat(k, n);
            for (int c = 0; c < bits; ++c)
                bmat(scales[static_cast<size_t>(c)], assign[static_cast<size_t>(c)]) = (*y)[static_cast<size_t>(c)];
            if (!psi_linearly_simplified(bmat, psi))
                throw InternalError("R_U oracle: independent scale placement failed the predicate");
            found.insert(std::move(bmat));
            int pos = bits - 1;
            while (pos >= 0 && assign[static_cast<size_t>(pos)] == n - 1) {
                assign[static_cast<size_t>(pos)] = 0;
                --pos;
            }
            if (pos < 0) break;
            ++assign[static_cast<size_t>(pos)];
        }
    }
    return {found.begin(), found.end()};
}

/// Unpruned R_F / R_U enumeration over every subset of the k x n cells.
std::vector<RMat> enumerate_rep_all_supports(int n, const Privacy<Rational>& priv,
                                             const Distribution<Rational>* z) {
    const RMat psi = enumerate_scales<Rational>(n, priv);
    const int k = psi.cols;
    const int cells = k * n;
    if (cells > 20) throw CapacityError("unpruned enumeration: too many cells");
    const RVec z_psi = z ? vecmat(z->p, psi) : RVec();
    std::set<RMat> found;
    for (uint64_t mask = 1; mask < (1ull << cells); ++mask) {
        std::vector<Cell> support;
        for (int cell = 0; cell < cells; ++cell)
            if (mask & (1ull << cell)) support.push_back({cell % k, cell / k});
        if (auto b = solve_support(support, psi, z_psi, z, n)) {
            const bool simplified = z ? psi_affinely_simplified(*b, *z, psi)
                                      : psi_linearly_simplified(*b, psi);
            if (simplified) found.insert(std::move(*b));
        }
    }
    return {found.begin(), found.end()};
}

std::vector<RMat> representation_vertices(PolytopeKind kind, int n, const Privacy<Rational>& priv,
                                          const Distribution<Rational>& z) {
    if (kind == PolytopeKind::kRF || kind == PolytopeKind::kF) return enumerate_rf(n, priv, z);
    return enumerate_ru(n, priv);
}

std::vector<RMat> filter_extreme_images(const std::vector<RMat>& reps, const RMat& psi,
                                        PolytopeKind kind, const Privacy<Rational>& priv,
                                        const Distribution<Rational>& z) {
    std::set<RMat> images;
    for (const auto& b : reps) images.insert(matmul(psi, b));
    std::vector<RMat> out;
    for (const auto& t : images) {
        const bool extreme = kind == PolytopeKind::kF
                                 ? is_extreme_in_F(t, z, priv, Rational(0))
                                 : is_extreme_in_U(t, priv, Rational(0));
        if (extreme) out.push_back(t);
    }
    return out;
}

std::string dump_matrix(const RMat& m) {
    std::ostringstream os;
    for (int i = 0; i < m.rows; ++i) {
        os << (i ? "; " : "[");
        for (int j = 0; j < m.cols; ++j) os << (j ? " " : "") << rational_to_string(m(i, j));
    }
    os << "]";
    return os.str();
}

}  // namespace

PolytopeKind polytope_kind_from_name(const std::string& name) {
    if (name == "F") return PolytopeKind::kF;
    if (name == "U") return PolytopeKind::kU;
    if (name == "RF") return PolytopeKind::kRF;
    if (name == "RU") return PolytopeKind::kRU;
    throw InputError("unknown polytope kind: " + name);
}

std::string polytope_kind_name(PolytopeKind kind) {
    switch (kind) {
        case PolytopeKind::kF: return "F";
        case PolytopeKind::kU: return "U";
        case PolytopeKind::kRF: return "RF";
        case PolytopeKind::kRU: return "RU";
    }
    return "?";
}

VertexSet enumerate_vertices(const PolytopeDescriptor& desc) {
    check_descriptor(desc);
    const bool representation = desc.kind == PolytopeKind::kRF || desc.kind == PolytopeKind::kRU;
    if (representation && desc.n > 3)
        throw CapacityError("enumerate_vertices: RF/RU enumeration is capped at n <= 3");
    if (!representation && desc.n > 4)
        throw CapacityError("enumerate_vertices: F/U enumeration is capped at n <= 4");
    const auto priv = privacy_of(desc);
    VertexSet out;
    const auto reps = representation_vertices(desc.kind, desc.n, priv, desc.z);
    if (representation) {
        out.vertices = reps;
        return out;
    }
    const RMat psi = enumerate_scales<Rational>(desc.n, priv);
    out.vertices = filter_extreme_images(reps, psi, desc.kind, priv, desc.z);
    return out;
}

VertexSet enumerate_representation_unpruned(const PolytopeDescriptor& desc) {
    check_descriptor(desc);
    if (desc.kind != PolytopeKind::kRF && desc.kind != PolytopeKind::kRU)
        throw InputError("unpruned enumeration applies to RF/RU only");
    if (desc.n > 3) throw CapacityError("unpruned enumeration is capped at n <= 3");
    const auto priv = privacy_of(desc);
    VertexSet out;
    out.vertices = enumerate_rep_all_supports(
        desc.n, priv, desc.kind == PolytopeKind::kRF ? &desc.z : nullptr);
    return out;
}

VertexSet direct_enumerate_matrix_polytope(const PolytopeDescriptor& desc) {
    check_descriptor(desc);
    if (desc.kind != PolytopeKind::kF && desc.kind != PolytopeKind::kU)
        throw InputError("direct enumeration applies to F/U only");
    if (desc.n > 3) throw CapacityError("direct enumeration is capped at n <= 3");
    const auto priv = privacy_of(desc);
    const int n = desc.n;
    const int nn = n * n;
    const bool fixed = desc.kind == PolytopeKind::kF;

    std::vector<RVec> eq_rows;
    RVec eq_rhs;
    for (int i = 0; i < n; ++i) {
        RVec row(static_cast<size_t>(nn), Rational(0));
        for (int j = 0; j < n; ++j) row[static_cast<size_t>(i * n + j)] = 1;
        eq_rows.push_back(std::move(row));
        eq_rhs.push_back(Rational(1));
    }
    if (fixed) {
        for (int j = 0; j < n; ++j) {
            RVec row(static_cast<size_t>(nn), Rational(0));
            for (int i = 0; i < n; ++i) row[static_cast<size_t>(i * n + j)] = desc.z.p[static_cast<size_t>(i)];
            eq_rows.push_back(std::move(row));
            eq_rhs.push_back(desc.z.p[static_cast<size_t>(j)]);
        }
    }
    std::vector<RVec> ineq_rows;  // all homogeneous: row . t = 0 when binding
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            RVec row(static_cast<size_t>(nn), Rational(0));
            row[static_cast<size_t>(i * n + j)] = 1;
            ineq_rows.push_back(std::move(row));
        }
    }
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i + 1 < n; ++i) {
            RVec up(static_cast<size_t>(nn), Rational(0));
            up[static_cast<size_t>(i * n + j)] = 1;
            up[static_cast<size_t>((i + 1) * n + j)] = -priv.lambda;
            ineq_rows.push_back(std::move(up));
            RVec lo(static_cast<size_t>(nn), Rational(0));
            lo[static_cast<size_t>(i * n + j)] = 1;
            lo[static_cast<size_t>((i + 1) * n + j)] = -priv.lambda_inv;
            ineq_rows.push_back(std::move(lo));
        }
    }

    Mat<Rational> eq_mat(static_cast<int>(eq_rows.size()), nn);
    for (int r = 0; r < eq_mat.rows; ++r)
        for (int c = 0; c < nn; ++c) eq_mat(r, c) = eq_rows[static_cast<size_t>(r)][static_cast<size_t>(c)];
    const int eq_rank = rank_exact(eq_mat);
    const int need = nn - eq_rank;
    const int g = static_cast<int>(ineq_rows.size());

    std::set<RMat> found;
    std::vector<int> combo(static_cast<size_t>(need));
    for (int i = 0; i < need; ++i) combo[static_cast<size_t>(i)] = i;
    const auto priv_d = priv;
    for (;;) {
        Mat<Rational> a(static_cast<int>(eq_rows.size()) + need, nn);
        RVec b(static_cast<size_t>(a.rows), Rational(0));
        for (size_t r = 0; r < eq_rows.size(); ++r) {
            for (int c = 0; c < nn; ++c) a(static_cast<int>(r), c) = eq_rows[r][static_cast<size_t>(c)];
            b[r] = eq_rhs[r];
        }
        for (int e = 0; e < need; ++e) {
            const auto& row = ineq_rows[static_cast<size_t>(combo[static_cast<size_t>(e)])];
            for (int c = 0; c < nn; ++c) a(static_cast<int>(eq_rows.size()) + e, c) = row[static_cast<size_t>(c)];
        }
        bool unique = false;
        auto x = solve_exact(std::move(a), std::move(b), false, &unique);
        if (x && unique) {
            RMat t(n, n);
            t.a = *x;
            const bool member = fixed ? in_F(t, desc.z, priv_d, Rational(0))
                                      : in_U(t, priv_d, Rational(0));
            if (member) found.insert(std::move(t));
        }
        int pos = need - 1;
        while (pos >= 0 && combo[static_cast<size_t>(pos)] == g - need + pos) --pos;
        if (pos < 0) break;
        ++combo[static_cast<size_t>(pos)];
        for (int q = pos + 1; q < need; ++q) combo[static_cast<size_t>(q)] = combo[static_cast<size_t>(q - 1)] + 1;
    }
    VertexSet out;
    out.vertices.assign(found.begin(), found.end());
    return out;
}

RepresentationReport verify_representation_theorems(const PolytopeDescriptor& desc) {
    check_descriptor(desc);
    if (desc.kind != PolytopeKind::kF && desc.kind != PolytopeKind::kU)
        throw InputError("verify_representation_theorems applies to F/U only");
    if (desc.n > 3) throw CapacityError("verify_representation_theorems is capped at n <= 3");
    const auto priv = privacy_of(desc);
    const RMat psi = enumerate_scales<Rational>(desc.n, priv);

    const auto reps = representation_vertices(desc.kind, desc.n, priv, desc.z);
    std::vector<RMat> images;
    images.reserve(reps.size());
    for (const auto& b : reps) images.push_back(matmul(psi, b));

    std::set<RMat> image_set(images.begin(), images.end());
    const auto direct = direct_enumerate_matrix_polytope(desc);

    RepresentationReport report;
    report.num_representation_vertices = static_cast<int>(reps.size());
    report.num_images = static_cast<int>(image_set.size());
    report.num_extreme = static_cast<int>(direct.vertices.size());

    std::ostringstream detail;

    // (a) every independently enumerated extreme point has a representation.
    report.every_extreme_covered = true;
    for (const auto& t : direct.vertices) {
        if (!image_set.count(t)) {
            report.every_extreme_covered = false;
            detail << "extreme point with no representation vertex: " << dump_matrix(t) << "\n";
        }
    }

    // (b) some representation vertex maps to a non-extreme point.
    // (c) two distinct representation vertices share one extreme image.
    std::set<RMat> extreme_set(direct.vertices.begin(), direct.vertices.end());
    std::set<RMat> seen_extreme_images;
    for (size_t i = 0; i < reps.size(); ++i) {
        const bool extreme = extreme_set.count(images[i]) > 0;
        if (!extreme) {
            if (!report.some_representation_drops) {
                detail << "representation vertex with non-extreme image: " << dump_matrix(reps[i])
                       << " -> " << dump_matrix(images[i]) << "\n";
            }
            report.some_representation_drops = true;
        } else if (!seen_extreme_images.insert(images[i]).second) {
            if (!report.some_collision) {
                detail << "second representation vertex for image " << dump_matrix(images[i])
                       << ": " << dump_matrix(reps[i]) << "\n";
            }
            report.some_collision = true;
        }
    }
    report.detail = detail.str();

    // (b) and (c) need room for collisions; below n = 3 there are none to find.
    const bool want_witnesses = desc.n >= 3;
    if (!report.every_extreme_covered ||
        (want_witnesses && (!report.some_representation_drops || !report.some_collision))) {
        throw InternalError("representation theorem verification failed:\n" + report.detail +
                            "covered=" + std::to_string(report.every_extreme_covered) +
                            " drops=" + std::to_string(report.some_representation_drops) +
                            " collision=" + std::to_string(report.some_collision));
    }
    return report;
}

}  // namespace countdist
