#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "abelian.hpp"
#include "galois_module.hpp"
#include "integer.hpp"
#include "iwasawa.hpp"
#include "lvalues.hpp"
#include "nfengine.hpp"
#include "quadratic.hpp"

namespace wildtame {

/* ---------- report vocabulary ---------- */

enum class Verdict { Split, NonSplit, TriviallySplit, NeedsLevelOneData, Unknown };

inline std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Split: return "Split";
        case Verdict::NonSplit: return "NonSplit";
        case Verdict::TriviallySplit: return "TriviallySplit";
        case Verdict::NeedsLevelOneData: return "NeedsLevelOneData";
        case Verdict::Unknown: return "Unknown";
    }
    throw std::logic_error("verdict_name: unhandled verdict");
}

inline Verdict verdict_from_name(const std::string &s) {
    if (s == "Split") return Verdict::Split;
    if (s == "NonSplit") return Verdict::NonSplit;
    if (s == "TriviallySplit") return Verdict::TriviallySplit;
    if (s == "NeedsLevelOneData") return Verdict::NeedsLevelOneData;
    if (s == "Unknown") return Verdict::Unknown;
    throw std::invalid_argument("verdict_from_name: " + s);
}

enum class WildTriviality { trivial, nontrivial, unknown };

struct EvidenceItem {
    std::string rule;
    std::string statement;
    std::vector<std::pair<std::string, std::string>> inputs;
};

struct KernelReport {
    Int delta = 0;
    std::string k_label;
    Int k_disc = 0;
    std::string kprime_label; /* empty when delta is outside the family */
    Int kprime_disc = 0;
    int local_index = 1;
    std::optional<long> v3_order;
    std::string v3_source; /* "birch-tate" | "ingested" | "" */
    std::optional<long> rank3;
    std::optional<FiniteAbelianGroup> k2_structure;
    std::optional<FiniteAbelianGroup> wk_structure;
    Verdict verdict = Verdict::Unknown;
    std::vector<EvidenceItem> evidence;
    std::string assurance = "pinned";
    std::string banner;
};

inline const char *standing_banner() {
    return "Standing assumptions: Leopoldt and Gross for all layers involved; "
           "both hold unconditionally for the abelian fields treated here.";
}

/* ---------- record lookup ---------- */

/* Plain directories hold one record per file named <label>.wtrec; caches are
 * CacheStore directories written by ingest. Directories win over caches, and
 * earlier entries win inside each list. */
struct DataSources {
    std::vector<std::filesystem::path> dirs;
    std::vector<std::filesystem::path> caches;

    std::optional<ClassGroupRecord> find(const std::string &label) const {
        namespace fs = std::filesystem;
        for (const fs::path &d : dirs) {
            fs::path p = d / (label + ".wtrec");
            std::ifstream in(p, std::ios::binary);
            if (!in) continue;
            std::ostringstream buf;
            buf << in.rdbuf();
            ClassGroupRecord rec = parse_record(buf.str());
            if (rec.field.label != label)
                throw std::runtime_error("data record label mismatch in " + p.string());
            return rec;
        }
        for (const fs::path &c : caches) {
            std::error_code ec;
            if (!fs::is_directory(c, ec)) continue;
            std::optional<ClassGroupRecord> rec = CacheStore(c).get(label, "ingested");
            if (rec) return rec;
        }
        return std::nullopt;
    }
};

/* ---------- elementary criteria ---------- */

inline bool delta_in_family(const Int &delta) {
    if (delta == 0 || delta == 1 || delta == -3) return false;
    if (mod_floor(delta, Int(9)) != 6) return false;
    return is_square_free(delta);
}

/* order of K2(o_k){3} / WK2(k){3}: 3 exactly when the completion above 3
 * acquires mu_3 while k lacks it */
inline int local_mu_index(const Int &delta) {
    if (delta == 0 || delta == 1 || !is_square_free(delta))
        throw std::invalid_argument("local_mu_index: not a squarefree radicand");
    return (delta != -3 && mod_floor(delta, Int(9)) == 6) ? 3 : 1;
}

namespace detail {

/* delta = -3 (mod 9) makes -delta/3 a squarefree radicand prime to 3 */
inline QuadDiscriminant mirror_discriminant(const Int &delta) {
    return fundamental_discriminant(-delta / 3);
}

/* the unique abelian 3-group of order 3^a and rank r, when it is unique */
inline std::optional<FiniteAbelianGroup> forced_structure(long a, long r) {
    if (r < 0 || a < r) return std::nullopt;
    if (r == 0) return a == 0 ? std::optional<FiniteAbelianGroup>(FiniteAbelianGroup())
                              : std::nullopt;
    if (r == 1)
        return FiniteAbelianGroup::from_factors(
            {pow_int(Int(3), static_cast<unsigned long>(a))});
    std::vector<Int> f(static_cast<std::size_t>(r), Int(3));
    if (a == r) return FiniteAbelianGroup::from_factors(f);
    if (a == r + 1) {
        f.back() = Int(9);
        return FiniteAbelianGroup::from_factors(f);
    }
    return std::nullopt;
}

}  // namespace detail

/* 3-rank of the tame kernel: rank of the mirror 3-class group plus one */
inline long keune_tate_rank(const Int &delta, const FiniteAbelianGroup &a_kprime) {
    if (!delta_in_family(delta))
        throw std::invalid_argument("keune_tate_rank: delta outside the admissible family");
    return static_cast<long>(a_kprime.p_rank(Int(3))) + 1;
}

inline long keune_tate_rank(const Int &delta) {
    if (!delta_in_family(delta))
        throw std::invalid_argument("keune_tate_rank: delta outside the admissible family");
    return keune_tate_rank(delta, s_class_group(detail::mirror_discriminant(delta), Int(3)));
}

/* WK2(k){3} vanishes exactly when the mirror Iwasawa module does */
inline WildTriviality wild_triviality(const std::optional<PsiResult> &psi_res,
                                      const FiniteAbelianGroup &a_kprime) {
    if (!a_kprime.is_trivial()) return WildTriviality::nontrivial;
    if (!psi_res) return WildTriviality::unknown;
    return psi_res->group.is_trivial() ? WildTriviality::trivial : WildTriviality::nontrivial;
}

/* Split exactly when k2 = wk (+) quotient as abelian groups */
inline Verdict abelian_split_decision(const FiniteAbelianGroup &k2, const FiniteAbelianGroup &wk,
                                      const FiniteAbelianGroup &quotient) {
    if (wk.order() * quotient.order() != k2.order())
        throw std::invalid_argument("abelian_split_decision: quotient order mismatch");
    std::vector<Int> f = wk.invariants();
    for (const Int &d : quotient.invariants()) f.push_back(d);
    FiniteAbelianGroup sum =
        f.empty() ? FiniteAbelianGroup() : FiniteAbelianGroup::from_factors(f);
    return sum.invariants() == k2.invariants() ? Verdict::Split : Verdict::NonSplit;
}

inline Verdict abelian_split_decision(const FiniteAbelianGroup &k2, const FiniteAbelianGroup &wk) {
    return abelian_split_decision(k2, wk, FiniteAbelianGroup::from_factors({Int(3)}));
}

/* the twisted coinvariants (A'_{K1} (x) mu) over the full layer group */
inline FiniteAbelianGroup wk_from_level_one(const ClassGroupRecord &rec) {
    const FiniteAbelianGroup &g = rec.s_class_group;
    if (!detail::is_three_group(g))
        throw std::invalid_argument("wk_from_level_one: record group is not a 3-group");
    if (g.is_trivial()) return g;
    std::optional<IntMatrix> gm, dm;
    for (const auto &[name, m] : rec.galois_actions) {
        if (name == "gamma") gm = m;
        if (name == "delta") dm = m;
    }
    if (!gm || !dm)
        throw std::invalid_argument("wk_from_level_one: record lacks gamma or delta action data");
    Int q = g.exponent();
    long level = valuation(q, Int(3));
    /* the canonical tower generator multiplies 3-power roots of unity by 1+3 */
    CyclotomicCharacterTable chi(Int(3), level, {{"gamma", Int(4)}, {"delta", Int(-1)}});
    FiniteGaloisModule m(g, {{"gamma", GroupHom(g, g, *gm)}, {"delta", GroupHom(g, g, *dm)}}, q);
    return coinvariants(tate_twist(m, 1, chi)).group;
}

/* ---------- full analysis ---------- */

inline KernelReport analyze(const Int &delta, const DataSources &data = {}) {
    if (delta == 0 || delta == 1)
        throw std::invalid_argument("analyze: delta must be a nontrivial radicand");
    if (!is_square_free(delta)) throw std::invalid_argument("analyze: delta must be squarefree");

    KernelReport rep;
    rep.delta = delta;
    rep.banner = standing_banner();
    QuadDiscriminant qk = fundamental_discriminant(delta);
    NumberFieldDesc k = field_quadratic(qk);
    rep.k_label = k.label;
    rep.k_disc = qk.D;
    rep.local_index = local_mu_index(delta);

    if (!delta_in_family(delta)) {
        rep.verdict = Verdict::TriviallySplit;
        rep.evidence.push_back(
            {"R-LOC",
             "local index at 3 equals 1, so the wild and tame 3-kernels coincide and the "
             "quotient is trivial",
             {{"delta", delta.str()}}});
        return rep;
    }

    int weakest = assurance_level("pinned");
    auto absorb = [&](const std::string &a) { weakest = std::min(weakest, assurance_level(a)); };
    auto assurance_name = [](int lvl) {
        return lvl <= 0 ? std::string("heuristic")
                        : (lvl == 1 ? std::string("pinned") : std::string("ingested-trusted"));
    };

    rep.evidence.push_back({"LOC",
                            "the completion above 3 acquires the cube roots of unity while k "
                            "lacks them; the tame kernel covers the wild kernel with index 3",
                            {{"local_index", "3"}}});

    QuadDiscriminant qm = detail::mirror_discriminant(delta);
    NumberFieldDesc kp = field_quadratic(qm);
    rep.kprime_label = kp.label;
    rep.kprime_disc = qm.D;

    ClassGroupRecord base = class_group_generic(kp);
    absorb(base.assurance);
    const FiniteAbelianGroup &aprime = base.s_class_group;
    rep.evidence.push_back({"AKP",
                            "3-part of the 3-class group of the mirror field",
                            {{"field", kp.label},
                             {"group", invariants_to_string(aprime)},
                             {"assurance", base.assurance}}});

    long rank = keune_tate_rank(delta, aprime);
    rep.rank3 = rank;
    rep.evidence.push_back(
        {"KT",
         "3-rank of the tame kernel equals the 3-rank of the mirror 3-class group plus one",
         {{"rank3", std::to_string(rank)}}});

    std::optional<PsiResult> psi_res;
    std::optional<ClassGroupRecord> l1 = data.find(kp.label + ".l1");
    if (l1) {
        NumberFieldDesc expect = layer_field(kp, 1);
        if (l1->field.poly != expect.poly)
            throw std::runtime_error(
                "analyze: level-one record polynomial does not match the tower layer");
        TowerData t = make_tower({base, *l1});
        psi_res = psi(t);
        absorb(psi_res->assurance);
        rep.evidence.push_back({"PSI",
                                "boundary kernel computed from tower data at finite level",
                                {{"level", std::to_string(psi_res->level)},
                                 {"group", invariants_to_string(psi_res->group)},
                                 {"assurance", psi_res->assurance}}});
    } else if (single_prime_above_3(kp)) {
        psi_res = PsiResult{FiniteAbelianGroup(), 0, "pinned"};
        rep.evidence.push_back({"PSI-1P",
                                "a single prime above 3 in the mirror tower forces the boundary "
                                "kernel to vanish at every level",
                                {{"field", kp.label}}});
    }

    if (delta > 0) {
        rep.v3_order = k2_order_3part(delta);
        rep.v3_source = "birch-tate";
        rep.evidence.push_back({"BT",
                                "tame kernel order from the Birch-Tate formula",
                                {{"v3", std::to_string(*rep.v3_order)}}});
    } else {
        std::optional<ClassGroupRecord> hk = data.find(k.label);
        if (hk) {
            for (const auto &[name, n] : hk->extra_invariants) {
                if (name != "k2order3") continue;
                long v = n > 0 ? valuation(n, Int(3)) : -1;
                if (v < 0 || pow_int(Int(3), static_cast<unsigned long>(v)) != n)
                    throw std::runtime_error(
                        "analyze: ingested tame kernel order is not a 3-power");
                absorb(hk->assurance);
                rep.v3_order = v;
                rep.v3_source = "ingested";
                rep.evidence.push_back({"H2",
                                        "tame kernel order ingested from an etale cohomology "
                                        "computation",
                                        {{"v3", std::to_string(v)},
                                         {"assurance", hk->assurance}}});
                break;
            }
        }
    }

    bool psi_known = psi_res.has_value();
    bool psi_zero = psi_known && psi_res->group.is_trivial();
    bool ap_zero = aprime.is_trivial();
    bool wk_nontrivial = (psi_known && !psi_zero) || !ap_zero;
    if (wk_nontrivial && rep.v3_order && *rep.v3_order < 2)
        throw std::logic_error("analyze: tame kernel order contradicts a nontrivial wild kernel");

    if (!psi_known && rep.v3_order && *rep.v3_order == 1) {
        psi_known = true;
        psi_zero = true;
        rep.evidence.push_back({"CARD",
                                "a tame kernel of order 3 meets the index-3 bound exactly, so "
                                "the wild kernel vanishes and the boundary kernel is trivial",
                                {{"v3", "1"}}});
    }

    if (!psi_known) {
        rep.verdict = Verdict::NeedsLevelOneData;
        rep.evidence.push_back({"R-NEED",
                                "boundary kernel and level-one data are required beyond this "
                                "point but are not available",
                                {{"wanted", kp.label + ".l1"}}});
    } else if (psi_zero && ap_zero) {
        if (rep.v3_order && *rep.v3_order != 1)
            throw std::logic_error("analyze: tame kernel order contradicts a trivial wild kernel");
        rep.verdict = Verdict::TriviallySplit;
        rep.wk_structure = FiniteAbelianGroup();
        rep.k2_structure = FiniteAbelianGroup::from_factors({Int(3)});
        rep.evidence.push_back({"R0",
                                "trivial boundary kernel and trivial mirror class group force a "
                                "trivial wild kernel; the tame kernel is cyclic of order 3 and "
                                "contains it trivially split",
                                {}});
    } else if (psi_zero) {
        rep.verdict = Verdict::Split;
        if (rep.v3_order) {
            if (auto wk = detail::forced_structure(*rep.v3_order - 1, rank - 1)) {
                rep.wk_structure = *wk;
                std::vector<Int> f = wk->invariants();
                f.push_back(Int(3));
                rep.k2_structure = FiniteAbelianGroup::from_factors(f);
            }
        }
        rep.evidence.push_back(
            {"R1",
             "trivial boundary kernel makes the wild kernel a direct summand of the tame kernel",
             {}});
    } else if (ap_zero) {
        rep.verdict = Verdict::NonSplit;
        if (rep.v3_order) {
            rep.k2_structure = detail::forced_structure(*rep.v3_order, 1);
            rep.wk_structure = detail::forced_structure(*rep.v3_order - 1, 1);
        }
        rep.evidence.push_back({"R2",
                                "nontrivial boundary kernel over a trivial mirror class group "
                                "makes the tame kernel cyclic with the wild kernel as its unique "
                                "index-3 subgroup",
                                {}});
    } else {
        if (rep.v3_order) rep.k2_structure = detail::forced_structure(*rep.v3_order, rank);
        if (rep.k2_structure && rep.k2_structure->exponent() == 3) {
            rep.verdict = Verdict::Split;
            rep.wk_structure = FiniteAbelianGroup::from_factors(
                std::vector<Int>(static_cast<std::size_t>(*rep.v3_order - 1), Int(3)));
            rep.evidence.push_back(
                {"R3",
                 "an elementary tame kernel contains every subgroup as a direct summand",
                 {{"decision", "Split"}}});
        } else {
            std::optional<ClassGroupRecord> k1 = data.find("K1(" + delta.str() + ")");
            if (!k1) {
                rep.verdict = Verdict::NeedsLevelOneData;
                rep.evidence.push_back({"R-NEED",
                                        "boundary kernel and level-one data are required beyond "
                                        "this point but are not available",
                                        {{"wanted", "K1(" + delta.str() + ")"}}});
            } else {
                absorb(k1->assurance);
                FiniteAbelianGroup wk = wk_from_level_one(*k1);
                rep.wk_structure = wk;
                rep.evidence.push_back({"WK1",
                                        "wild kernel realized as the twisted coinvariant group "
                                        "of the level-one class group",
                                        {{"record", k1->field.label},
                                         {"group", invariants_to_string(wk)}}});
                if (rep.k2_structure) {
                    if (wk.order() * 3 != rep.k2_structure->order())
                        throw std::logic_error(
                            "analyze: wild kernel order contradicts the tame kernel order");
                    rep.verdict = abelian_split_decision(*rep.k2_structure, wk);
                } else {
                    rep.verdict = Verdict::Unknown;
                }
                rep.evidence.push_back(
                    {"R3",
                     "wild kernel compared against the tame kernel by elementary divisors",
                     {{"decision", verdict_name(rep.verdict)}}});
            }
        }
    }

    if (delta < 0 && rep.k2_structure && !rep.k2_structure->is_trivial() &&
        rep.k2_structure->exponent() == 3)
        rep.evidence.push_back(
            {"D-DESC",
             "an exponent-3 tame kernel splits the descent surjection onto the Gamma-invariants",
             {}});
    if (qm.D > 0 && psi_known && !psi_zero)
        rep.evidence.push_back({"D-LIM",
                                "for a real mirror field Greenberg's conjecture makes the limit "
                                "codescent kernel vanish although the level-zero kernel does not",
                                {}});

    rep.assurance = assurance_name(weakest);
    if (weakest < assurance_level("pinned") &&
        (rep.verdict == Verdict::Split || rep.verdict == Verdict::NonSplit)) {
        rep.verdict = Verdict::Unknown;
        rep.evidence.push_back({"R-ASSUR",
                                "a split or non-split claim needs every input at assurance "
                                "pinned or better",
                                {{"weakest", rep.assurance}}});
    }

    if (rep.rank3 && rep.v3_order && *rep.rank3 > *rep.v3_order)
        throw std::logic_error("analyze: tame kernel rank exceeds its order valuation");
    if (rep.wk_structure && rep.k2_structure &&
        rep.wk_structure->order() * rep.local_index != rep.k2_structure->order())
        throw std::logic_error("analyze: wild kernel order contradicts the tame kernel order");
    return rep;
}

/* ---------- range scan ---------- */

inline std::vector<Int> family_candidates(const Int &from, const Int &to) {
    std::vector<Int> out;
    Int start = from + mod_floor(Int(6) - from, Int(9));
    for (Int d = start; d <= to; d += 9)
        if (d != 0 && d != 1 && is_square_free(d)) out.push_back(d);
    return out;
}

namespace detail {

inline KernelReport analyze_or_capsule(const Int &d, const DataSources &data) {
    try {
        return analyze(d, data);
    } catch (const std::exception &e) {
        KernelReport rep;
        rep.delta = d;
        rep.banner = standing_banner();
        rep.verdict = Verdict::Unknown;
        rep.assurance = "heuristic";
        rep.evidence.push_back({"ERR", "analysis failed for this delta", {{"error", e.what()}}});
        return rep;
    }
}

}  // namespace detail

inline std::vector<KernelReport> scan(const Int &from, const Int &to,
                                      const DataSources &data = {}, long jobs = 1) {
    if (from > to) throw std::invalid_argument("scan: inverted range");
    if (jobs < 1) throw std::invalid_argument("scan: jobs must be >= 1");
    std::vector<Int> deltas = family_candidates(from, to);
    std::vector<KernelReport> out(deltas.size());
    long workers = std::min<long>(jobs, static_cast<long>(deltas.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < deltas.size(); ++i)
            out[i] = detail::analyze_or_capsule(deltas[i], data);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (long t = 0; t < workers; ++t)
        pool.emplace_back([&]() {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= deltas.size()) return;
                out[i] = detail::analyze_or_capsule(deltas[i], data);
            }
        });
    for (std::thread &th : pool) th.join();
    return out;
}

}  // namespace wildtame
