#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "suspension.hpp"
#include "system.hpp"
#include "tree.hpp"
#include "words.hpp"

namespace heartwood {

/*
 * Increasing sequences of induced systems K(1) <= ... <= K(m) inside a host
 * system, with the stagewise translation length tables that exhibit the
 * length-decreasing morphisms j_{m,n}.
 */
struct ApproxSequence {
    IsometrySystem host;
    std::vector<ClosedSubtree> stage_subtrees; // in host coordinates, nested
    std::vector<InducedSystem> stages;         // valid stages, aligned with stage_subtrees
    std::vector<std::string> skipped;          // leading stages dropped (empty generators)
};

inline ApproxSequence build_sequence(const IsometrySystem& host,
                                     const std::vector<ClosedSubtree>& subtrees) {
    if (subtrees.empty()) throw InputError("approximation sequence needs at least one stage");
    for (size_t i = 0; i + 1 < subtrees.size(); ++i)
        if (!subtrees[i].subset_of(host.tree(), subtrees[i + 1]))
            throw InputError("stage " + std::to_string(i + 1) + " is not contained in stage " +
                             std::to_string(i + 2));
    ApproxSequence seq;
    seq.host = host;
    bool seen_valid = false;
    for (size_t i = 0; i < subtrees.size(); ++i) {
        InducedSystem ind = induce(host, subtrees[i]);
        if (!ind.valid) {
            if (seen_valid)
                throw InternalError("induced domains shrank along an increasing sequence");
            std::string names;
            for (const auto& n : ind.empty_generators) names += (names.empty() ? "" : ", ") + n;
            seq.skipped.push_back("stage " + std::to_string(i + 1) + ": empty generators " + names);
            continue;
        }
        seen_valid = true;
        seq.stage_subtrees.push_back(subtrees[i]);
        seq.stages.push_back(std::move(ind));
    }
    if (seq.stages.empty()) throw InputError("every stage has an empty induced generator");
    return seq;
}

struct LengthTable {
    std::vector<ReducedWord> words;
    // cell [word][stage]; last column is the host; nullopt = budget exceeded
    std::vector<std::vector<std::optional<Scalar>>> cells;
    std::vector<std::string> stage_labels;
};

inline LengthTable length_table(const ApproxSequence& seq, const std::vector<ReducedWord>& words,
                                long long budget = 200000) {
    LengthTable table;
    for (const auto& w : words)
        if (w.empty() || !w.is_cyclically_reduced())
            throw InputError("length table needs nonempty cyclically reduced words");
    table.words = words;
    for (size_t s = 0; s < seq.stages.size(); ++s)
        table.stage_labels.push_back("K(" + std::to_string(s + 1) + ")");
    table.stage_labels.push_back("host");
    for (const auto& w : words) {
        std::vector<std::optional<Scalar>> row;
        for (const auto& stage : seq.stages) {
            try {
                row.push_back(translation_length(stage.sys, w).length);
            } catch (const ResourceError&) {
                row.push_back(std::nullopt);
            }
        }
        try {
            (void)budget;
            row.push_back(translation_length(seq.host, w).length);
        } catch (const ResourceError&) {
            row.push_back(std::nullopt);
        }
        table.cells.push_back(std::move(row));
    }
    return table;
}

struct ConvergenceReport {
    int wordlen = 0;
    std::vector<Scalar> stage_gaps; // max over words of ||w||_stage - ||w||_host
    bool non_increasing = true;
    Scalar final_gap;
    long long words_used = 0;
};

inline ConvergenceReport convergence_report(const ApproxSequence& seq, int wordlen,
                                            long long budget = 200000) {
    if (wordlen < 1) throw InputError("convergence report needs wordlen >= 1");
    ConvergenceReport rep;
    rep.wordlen = wordlen;
    std::vector<ReducedWord> words;
    for (int n = 1; n <= wordlen; ++n)
        for (const auto& w : enumerate_reduced(seq.host.alphabet(), n))
            if (w.is_cyclically_reduced()) words.push_back(w);
    rep.words_used = static_cast<long long>(words.size());
    std::vector<Scalar> host_lens;
    host_lens.reserve(words.size());
    for (const auto& w : words) host_lens.push_back(translation_length(seq.host, w).length);
    for (const auto& stage : seq.stages) {
        Scalar gap(0);
        for (size_t i = 0; i < words.size(); ++i) {
            Scalar l = translation_length(stage.sys, words[i]).length;
            internal_check(l >= host_lens[i], "stage length below host length");
            gap = max(gap, l - host_lens[i]);
        }
        rep.stage_gaps.push_back(gap);
    }
    for (size_t i = 0; i + 1 < rep.stage_gaps.size(); ++i)
        if (rep.stage_gaps[i] < rep.stage_gaps[i + 1]) rep.non_increasing = false;
    rep.final_gap = rep.stage_gaps.empty() ? Scalar(0) : rep.stage_gaps.back();
    (void)budget;
    return rep;
}

/*
 * Default stage policy: convex hulls of growing finite sets of pseudo-group
 * orbit points of the base vertex, which are dense in every segment for
 * minimal interval exchanges.  Deterministic breadth-first orbit order.
 */
inline std::vector<TreePoint> orbit_points(const IsometrySystem& sys, int count,
                                           TreePoint seed = TreePoint::at_vertex(0)) {
    if (count < 1) throw InputError("orbit needs count >= 1");
    std::vector<TreePoint> orbit{seed};
    std::vector<TreePoint> seen{seed};
    size_t next = 0;
    while (static_cast<int>(orbit.size()) < count && next < orbit.size()) {
        TreePoint p = orbit[next++];
        for (int z : sys.alphabet().letters_in_order()) {
            auto q = sys.apply_letter(p, z);
            if (!q) continue;
            if (std::find(seen.begin(), seen.end(), *q) != seen.end()) continue;
            seen.push_back(*q);
            orbit.push_back(*q);
            if (static_cast<int>(orbit.size()) == count) break;
        }
    }
    return orbit;
}

inline std::vector<ClosedSubtree> orbit_stage_hulls(const IsometrySystem& sys,
                                                    const std::vector<int>& sizes) {
    if (sizes.empty()) throw InputError("stage sizes must be nonempty");
    int most = *std::max_element(sizes.begin(), sizes.end());
    std::vector<TreePoint> orbit = orbit_points(sys, most);
    std::vector<ClosedSubtree> stages;
    for (int s : sizes) {
        if (s < 1 || s > static_cast<int>(orbit.size()))
            throw InputError("stage size beyond the reachable orbit");
        std::vector<TreePoint> pts(orbit.begin(), orbit.begin() + s);
        stages.push_back(ClosedSubtree::hull(sys.tree(), std::move(pts)));
    }
    return stages;
}

} // namespace heartwood
