#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "suspension.hpp"
#include "system.hpp"
#include "tree.hpp"
#include "words.hpp"

namespace heartwood {

// ---------------------------------------------------------------------------
// Admissible words Adm(K)
// ---------------------------------------------------------------------------

namespace detail {

// DFS over the word tree carrying the forward state F(w) = dom(w).w; dead
// branches are pruned (admissibility is prefix-monotone).
template <typename Visit>
void admissible_dfs(const IsometrySystem& sys, int n, bool positive_only, Visit&& visit) {
    struct Frame {
        ReducedWord w;
        ClosedSubtree f;
    };
    std::vector<Frame> stack{{ReducedWord(), sys.whole()}};
    while (!stack.empty()) {
        Frame fr = std::move(stack.back());
        stack.pop_back();
        if (!fr.w.empty()) visit(fr.w, fr.f);
        if (fr.w.length() == n) continue;
        auto order = sys.alphabet().letters_in_order();
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            int z = *it;
            if (positive_only && z < 0) continue;
            if (!fr.w.empty() && fr.w.last() == -z) continue;
            ClosedSubtree f2 = sys.forward_step(fr.f, z);
            if (f2.empty()) continue;
            stack.push_back({fr.w * ReducedWord::single(z), std::move(f2)});
        }
    }
}

} // namespace detail

// All admissible reduced words of length 1..n, sorted, with optional
// restriction to positive letters.
inline std::vector<ReducedWord> admissible_words(const IsometrySystem& sys, int n,
                                                 bool positive_only = false) {
    if (n < 1) throw InputError("admissible_words needs n >= 1");
    std::vector<ReducedWord> out;
    detail::admissible_dfs(sys, n, positive_only,
                           [&](const ReducedWord& w, const ClosedSubtree&) { out.push_back(w); });
    std::sort(out.begin(), out.end(), [&](const ReducedWord& a, const ReducedWord& b) {
        return word_order_less(sys.alphabet(), a, b);
    });
    return out;
}

// Admissible words of length exactly n together with their exact domains.
inline std::vector<std::pair<ReducedWord, ClosedSubtree>> admissible_frontier(
    const IsometrySystem& sys, int n, bool positive_only = false) {
    std::vector<std::pair<ReducedWord, ClosedSubtree>> out;
    detail::admissible_dfs(sys, n, positive_only, [&](const ReducedWord& w, const ClosedSubtree&) {
        if (w.length() == n) out.push_back({w, sys.dom(w)});
    });
    std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
        return word_order_less(sys.alphabet(), a.first, b.first);
    });
    return out;
}

// Counts per length 1..n.
inline std::vector<long long> admissible_counts(const IsometrySystem& sys, int n,
                                                bool positive_only = false) {
    std::vector<long long> counts(static_cast<size_t>(n) + 1, 0);
    detail::admissible_dfs(sys, n, positive_only, [&](const ReducedWord& w, const ClosedSubtree&) {
        counts[static_cast<size_t>(w.length())]++;
    });
    counts.erase(counts.begin());
    return counts;
}

// ---------------------------------------------------------------------------
// Laminary closure slice
// ---------------------------------------------------------------------------

struct LaminarySlice {
    int n = 0, k = 0;
    bool positive_only = false;
    std::vector<ReducedWord> admissible; // |w| <= n, raw-admissible
    std::vector<ReducedWord> surviving;  // kept: exists admissible v with v chopped_k = w
};

/*
 * Finite-depth laminary closure: keep an admissible w (|w| <= n) iff some
 * admissible v of length |w| + 2k chops down to it, i.e. w extends
 * admissibly by k letters on both sides.  The slice is subword-closed and
 * non-increasing in k, always inside Adm.
 */
inline LaminarySlice laminary_closure(const IsometrySystem& sys, int n, int k,
                                      bool positive_only = false, long long budget = 2000000) {
    if (n < 1 || k < 1) throw InputError("laminary_closure needs n >= 1 and k >= 1");
    LaminarySlice slice;
    slice.n = n;
    slice.k = k;
    slice.positive_only = positive_only;
    slice.admissible = admissible_words(sys, n, positive_only);

    long long nodes = 0;
    auto charge = [&](long long c) {
        nodes += c;
        if (nodes > budget)
            throw ResourceError("laminary closure exceeded the search budget of " +
                                    std::to_string(budget) + " nodes (n=" + std::to_string(n) +
                                    ", k=" + std::to_string(k) + ")",
                                budget);
    };

    auto order = sys.alphabet().letters_in_order();
    for (const auto& w : slice.admissible) {
        // Phase R: admissible right extensions w.x, |x| = k (forward states).
        ClosedSubtree d0 = sys.dom(w);
        ClosedSubtree f0 = sys.apply_subtree(d0, w);
        struct RFrame {
            ReducedWord wx;
            ClosedSubtree f;
            int depth;
        };
        std::vector<RFrame> rstack{{w, f0, 0}};
        bool survives = false;
        while (!rstack.empty() && !survives) {
            RFrame fr = std::move(rstack.back());
            rstack.pop_back();
            charge(1);
            if (fr.depth == k) {
                // Phase L: admissible left extensions u.(wx), |u| = k, via
                // dom(z v) = (image(z) cap dom(v)) . z^-1.
                struct LFrame {
                    int first; // current first letter
                    ClosedSubtree d;
                    int depth;
                };
                std::vector<LFrame> lstack{{fr.wx.first(), sys.dom(fr.wx), 0}};
                while (!lstack.empty()) {
                    LFrame lf = std::move(lstack.back());
                    lstack.pop_back();
                    charge(1);
                    if (lf.depth == k) {
                        survives = true;
                        break;
                    }
                    for (int z : order) {
                        if (positive_only && z < 0) continue;
                        if (z == -lf.first) continue; // keep u.v reduced
                        ClosedSubtree g = subtree_intersection(sys.tree(), sys.letter_image(z), lf.d);
                        if (g.empty()) continue;
                        lstack.push_back({z, sys.apply_letter_subtree(g, -z), lf.depth + 1});
                    }
                }
                continue;
            }
            for (int z : order) {
                if (positive_only && z < 0) continue;
                if (z == -fr.wx.last()) continue;
                ClosedSubtree f2 = sys.forward_step(fr.f, z);
                if (f2.empty()) continue;
                rstack.push_back({fr.wx * ReducedWord::single(z), std::move(f2), fr.depth + 1});
            }
        }
        if (survives) slice.surviving.push_back(w);
    }
    return slice;
}

// Least k <= kmax with slice(k) == slice(k+1); reports the stabilized slice.
struct StabilizedClosure {
    LaminarySlice slice;
    int stabilized_k = -1; // -1: did not stabilize within kmax
};

inline StabilizedClosure stabilized_closure(const IsometrySystem& sys, int n, int kmax,
                                            bool positive_only = false,
                                            long long budget = 2000000) {
    StabilizedClosure out;
    out.slice = laminary_closure(sys, n, 1, positive_only, budget);
    for (int k = 2; k <= kmax; ++k) {
        LaminarySlice next = laminary_closure(sys, n, k, positive_only, budget);
        if (next.surviving == out.slice.surviving) {
            out.stabilized_k = k - 1;
            return out;
        }
        out.slice = std::move(next);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Unit-cylinder leaves and the finite leaf pair set
// ---------------------------------------------------------------------------

struct LeafPair {
    ReducedWord x, y;      // canonical: x before y in word order, x1 != y1
    ClosedSubtree domain;  // dom(x) cap dom(y), nonempty
};

/*
 * Finite-depth unit-cylinder leaf candidates: pairs of admissible words of
 * length n with distinct initial letters whose domains intersect.  Pairs are
 * canonicalized by the flip, so each unordered pair appears once.
 */
inline std::vector<LeafPair> unit_cylinder_leaves(const IsometrySystem& sys, int n) {
    if (n < 1) throw InputError("unit_cylinder_leaves needs n >= 1");
    auto frontier = admissible_frontier(sys, n, false);
    std::vector<LeafPair> out;
    for (size_t i = 0; i < frontier.size(); ++i)
        for (size_t j = i + 1; j < frontier.size(); ++j) {
            const auto& [p, dp] = frontier[i];
            const auto& [s, ds] = frontier[j];
            if (p.first() == s.first()) continue;
            ClosedSubtree inter = subtree_intersection(sys.tree(), dp, ds);
            if (inter.empty()) continue;
            out.push_back(LeafPair{p, s, std::move(inter)});
        }
    return out;
}

// ---------------------------------------------------------------------------
// Dual laminary language membership (semi-decision)
// ---------------------------------------------------------------------------

struct DualResult {
    bool yes = false;
    ReducedWord left, right, witness; // witness = left . v . right
    Scalar witness_length;            // ||witness||
    long long candidates = 0;
    long long pruned = 0;
};

namespace detail {

class GapMemo {
public:
    explicit GapMemo(const IsometrySystem& sys) : sys_(&sys) {}

    // d(K, sK) for non-admissible s; nullopt when s is admissible.
    std::optional<Scalar> dead_gap(const ReducedWord& s) {
        auto it = memo_.find(s);
        if (it != memo_.end()) return it->second;
        std::optional<Scalar> gap;
        if (!sys_->is_admissible(s)) gap = translate_gap(*sys_, s);
        memo_[s] = gap;
        return gap;
    }

    // Some linear subword of c is dead with gap >= eps: then ||c'|| >= eps
    // for every cyclically reduced c' containing c, so the branch can be cut.
    bool has_heavy_dead_subword(const ReducedWord& c, const Scalar& eps) {
        for (int i = 0; i < c.length(); ++i)
            for (int j = i + 1; j <= c.length(); ++j) {
                auto g = dead_gap(c.subword(i, j));
                if (g && *g >= eps) return true;
            }
        return false;
    }

    // Same, restricted to subwords touching the last (or first) letter; the
    // rest were checked when the shorter word was built.
    bool heavy_at_boundary(const ReducedWord& c, const Scalar& eps, bool at_end) {
        if (at_end) {
            for (int i = 0; i < c.length(); ++i) {
                auto g = dead_gap(c.subword(i, c.length()));
                if (g && *g >= eps) return true;
            }
        } else {
            for (int j = 1; j <= c.length(); ++j) {
                auto g = dead_gap(c.subword(0, j));
                if (g && *g >= eps) return true;
            }
        }
        return false;
    }

private:
    const IsometrySystem* sys_;
    std::map<ReducedWord, std::optional<Scalar>> memo_;
};

} // namespace detail

/*
 * Searches for u, w with u.v.w reduced and cyclically reduced and
 * ||u.v.w|| < eps, in order of total length.  A branch whose current word
 * contains a non-admissible subword with gap >= eps cannot reach below eps
 * (the axis crosses that gap), so it is pruned.  NO-WITNESS is a
 * semi-decision bounded by search_len.
 */
inline DualResult dual_membership(const IsometrySystem& sys, const ReducedWord& v, const Scalar& eps,
                                  int search_len, long long budget = 500000) {
    if (eps.sign() <= 0) throw InputError("dual membership needs eps > 0");
    if (search_len < v.length()) throw InputError("search_len must be at least |v|");
    DualResult res;
    detail::GapMemo memo(sys);
    auto order = sys.alphabet().letters_in_order();

    auto charge = [&]() {
        if (++res.candidates > budget)
            throw ResourceError("dual membership exceeded the budget of " + std::to_string(budget) +
                                    " candidates",
                                budget);
    };

    // Every candidate contains v, so a heavy dead subword of v settles it.
    if (memo.has_heavy_dead_subword(v, eps)) return res;

    // Candidates c = u.v.w by total length; for each length, split the extra
    // letters into |u| and |w| and extend by DFS with the gap prune.
    for (int total = v.length(); total <= search_len && !res.yes; ++total) {
        int extra = total - v.length();
        for (int ulen = 0; ulen <= extra && !res.yes; ++ulen) {
            std::vector<ReducedWord> ustack{ReducedWord()};
            while (!ustack.empty() && !res.yes) {
                ReducedWord u = std::move(ustack.back());
                ustack.pop_back();
                if (u.length() < ulen) {
                    for (auto it = order.rbegin(); it != order.rend(); ++it) {
                        int z = *it;
                        int head = !u.empty() ? u.first() : (!v.empty() ? v.first() : 0);
                        if (head != 0 && z == -head) continue; // keep u.v reduced
                        charge();
                        ReducedWord u2 = ReducedWord::single(z) * u;
                        if (memo.heavy_at_boundary(u2 * v, eps, /*at_end=*/false)) {
                            res.pruned++;
                            continue;
                        }
                        ustack.push_back(std::move(u2));
                    }
                    continue;
                }
                ReducedWord uv = u * v;
                internal_check(uv.length() == u.length() + v.length(),
                               "u.v cancelled despite the junction guard");
                std::vector<ReducedWord> wstack{uv};
                while (!wstack.empty() && !res.yes) {
                    ReducedWord c = std::move(wstack.back());
                    wstack.pop_back();
                    if (c.length() == total) {
                        if (c.empty() || !c.is_cyclically_reduced()) continue;
                        charge();
                        Scalar len = translation_length(sys, c).length;
                        if (len < eps) {
                            res.yes = true;
                            res.left = u;
                            res.right = c.suffix_from(uv.length());
                            res.witness = c;
                            res.witness_length = len;
                        }
                        continue;
                    }
                    for (auto it = order.rbegin(); it != order.rend(); ++it) {
                        int z = *it;
                        if (!c.empty() && z == -c.last()) continue;
                        charge();
                        ReducedWord c2 = c * ReducedWord::single(z);
                        if (memo.heavy_at_boundary(c2, eps, /*at_end=*/true)) {
                            res.pruned++;
                            continue;
                        }
                        wstack.push_back(std::move(c2));
                    }
                }
            }
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Diagonal leaf closure at finite depth
// ---------------------------------------------------------------------------

struct FiniteLeafPair {
    ReducedWord x, y;     // canonical order: x before y
    ClosedSubtree domain; // dom(x) cap dom(y), nonempty
    friend bool operator<(const FiniteLeafPair& a, const FiniteLeafPair& b) {
        if (a.x != b.x) return a.x < b.x;
        return a.y < b.y;
    }
    friend bool operator==(const FiniteLeafPair& a, const FiniteLeafPair& b) {
        return a.x == b.x && a.y == b.y;
    }
};

namespace detail {
inline FiniteLeafPair canonical_pair(const IsometrySystem& sys, ReducedWord x, ReducedWord y,
                                     ClosedSubtree dom) {
    if (word_order_less(sys.alphabet(), y, x)) std::swap(x, y);
    return FiniteLeafPair{std::move(x), std::move(y), std::move(dom)};
}
// One finite word stands for the other's continuation when one is a prefix.
inline bool prefix_compatible(const ReducedWord& a, const ReducedWord& b) {
    int m = std::min(a.length(), b.length());
    return a.prefix(m) == b.prefix(m);
}
} // namespace detail

/*
 * The leaf set at depth n closed under the pseudo-action translates that
 * stay in the unit cylinder: translating (X, Y) by the inverse of a first
 * letter realizes the shift of the biinfinite word, keeps both halves
 * admissible, and keeps the initial letters distinct.  Halves stay in the
 * length range [1, n]; pairs whose domains become empty are dropped.
 */
inline std::vector<FiniteLeafPair> leafset_with_translates(const IsometrySystem& sys, int n) {
    std::vector<FiniteLeafPair> set;
    for (int m = 1; m <= n; ++m)
        for (const auto& leaf : unit_cylinder_leaves(sys, m))
            set.push_back(detail::canonical_pair(sys, leaf.x, leaf.y, leaf.domain));
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());

    std::vector<FiniteLeafPair> frontier = set;
    while (!frontier.empty()) {
        std::vector<FiniteLeafPair> next;
        for (const auto& pr : frontier)
            // shift moves: prepend the inverse of one half's first letter,
            // which drops the first letter of that half
            for (int z : {-pr.x.first(), -pr.y.first()}) {
                ReducedWord tx = ReducedWord::single(z) * pr.x;
                ReducedWord ty = ReducedWord::single(z) * pr.y;
                if (tx.empty() || ty.empty()) continue;
                if (tx.length() > n || ty.length() > n) continue;
                internal_check(tx.first() != ty.first(), "shift left the unit cylinder");
                ClosedSubtree d = subtree_intersection(sys.tree(), sys.dom(tx), sys.dom(ty));
                if (d.empty()) continue;
                FiniteLeafPair cand = detail::canonical_pair(sys, tx, ty, std::move(d));
                auto it = std::lower_bound(set.begin(), set.end(), cand);
                if (it != set.end() && *it == cand) continue;
                set.insert(it, cand);
                next.push_back(cand);
            }
        frontier = std::move(next);
    }
    return set;
}

struct DiagonalViolation {
    ReducedWord x, shared, z;
};

struct DiagonalReport {
    bool ok = true;
    long long chains_checked = 0;
    std::vector<DiagonalViolation> violations;
};

/*
 * Checks the diagonal-leaf condition on a finite leaf pair set: for pairs
 * (X, Q) and (Q', Z) chained through prefix-compatible halves whose pair
 * domains intersect (a shared endpoint must lie in both), either X and Z
 * agree to the common depth or the diagonal (X, Z) must be present.  At
 * finite depth absence is a violation certificate, presence is not a proof.
 */
inline DiagonalReport diagonal_closure_check(const IsometrySystem& sys,
                                             const std::vector<FiniteLeafPair>& leafset) {
    DiagonalReport rep;
    auto present = [&](const ReducedWord& a, const ReducedWord& b) {
        for (const auto& pr : leafset) {
            if (detail::prefix_compatible(pr.x, a) && detail::prefix_compatible(pr.y, b)) return true;
            if (detail::prefix_compatible(pr.x, b) && detail::prefix_compatible(pr.y, a)) return true;
        }
        return false;
    };
    for (size_t i = 0; i < leafset.size(); ++i)
        for (size_t j = 0; j < leafset.size(); ++j) {
            if (i == j) continue;
            if (subtree_intersection(sys.tree(), leafset[i].domain, leafset[j].domain).empty())
                continue;
            // orient both pairs so they chain through a shared half
            for (auto [x, q1] : {std::pair{leafset[i].x, leafset[i].y}, std::pair{leafset[i].y, leafset[i].x}})
                for (auto [q2, z] : {std::pair{leafset[j].x, leafset[j].y}, std::pair{leafset[j].y, leafset[j].x}}) {
                    if (!detail::prefix_compatible(q1, q2)) continue;
                    rep.chains_checked++;
                    if (detail::prefix_compatible(x, z)) continue; // X = X'' case
                    // strip the common prefix: the diagonal's unit-cylinder
                    // representative lives at the shifted marker
                    int c = 0;
                    while (c < x.length() && c < z.length() && x.letter(c) == z.letter(c)) c++;
                    if (!present(x.suffix_from(c), z.suffix_from(c))) {
                        rep.ok = false;
                        if (rep.violations.size() < 16)
                            rep.violations.push_back(DiagonalViolation{x, q1, z});
                    }
                }
        }
    return rep;
}

} // namespace heartwood
