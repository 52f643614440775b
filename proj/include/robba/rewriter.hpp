#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "group.hpp"
#include "laurent.hpp"
#include "parallel.hpp"

namespace robba {

/// Letters +g for b_g and -g for b_g^-1 (g counted from 1). Words are kept
/// freely reduced.
using Word = std::vector<std::int8_t>;

inline void push_letter(Word& w, std::int8_t letter) {
    if (!w.empty() && w.back() == -letter)
        w.pop_back();
    else
        w.push_back(letter);
}

inline Word reduced(const Word& w) {
    Word r;
    r.reserve(w.size());
    for (auto l : w) push_letter(r, l);
    return r;
}

/// b_1^a_1 ... b_d^a_d as a word.
inline Word canonical_word(const Monomial& a) {
    Word w;
    for (std::size_t i = 0; i < a.size(); ++i) {
        auto g = static_cast<std::int8_t>(i + 1);
        for (int k = 0; k < std::abs(a[i]); ++k) w.push_back(a[i] > 0 ? g : static_cast<std::int8_t>(-g));
    }
    return w;
}

inline int letter_index(std::int8_t l) { return l > 0 ? l : -l; }

/// Position t of the first letter pair with x_t > x_(t+1), or -1.
inline int first_violation(const Word& w) {
    for (std::size_t t = 0; t + 1 < w.size(); ++t)
        if (letter_index(w[t]) > letter_index(w[t + 1])) return static_cast<int>(t);
    return -1;
}
inline bool is_canonical(const Word& w) { return first_violation(w) < 0; }

/// Number of pairs i < j with x_i > x_j.
inline int disorder(const Word& w) {
    int n = 0;
    for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t j = i + 1; j < w.size(); ++j)
            if (letter_index(w[i]) > letter_index(w[j])) ++n;
    return n;
}

inline int word_degree(const Word& w) {
    int s = 0;
    for (auto l : w) s += l > 0 ? 1 : -1;
    return s;
}

/// m_j(w): the degree of w in each generator.
inline Monomial word_exponents(const Word& w, int d) {
    Monomial m(d, 0);
    for (auto l : w) m[letter_index(l) - 1] += l > 0 ? 1 : -1;
    return m;
}

inline std::string word_str(const Word& w) {
    if (w.empty()) return "1";
    std::string s;
    for (auto l : w) {
        if (!s.empty()) s += "*";
        s += "b" + std::to_string(letter_index(l));
        if (l < 0) s += "^-1";
    }
    return s;
}

/// f(c w) = 2 v(c) + deg w + max_j m_j(w): the log of the norm at p^(-1/2)
/// in base p^(-1/2), plus the largest generator degree.
inline int potential(const PadicScalar& c, const Word& w, int d) {
    Monomial m = word_exponents(w, d);
    return 2 * c.valuation() + word_degree(w) + *std::max_element(m.begin(), m.end());
}

struct WeightedTerm {
    PadicScalar coeff;
    Word word;
};

struct SwapResult {
    WeightedTerm head;
    std::vector<WeightedTerm> corrections;
    ErrorLedger tail;  // commutator content beyond the computed degree
};

struct PotentialRecord {
    Word word;
    int f_in = 0;
    int f_head = 0;
    int f_corr_min = 0;  // f_in when there are no corrections
    int disorder_in = 0;
    int disorder_head = 0;
    bool ok() const { return f_head == f_in && f_corr_min >= f_in; }
};

struct CapOverflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Canonical expansion of b_i b_j - b_j b_i, terms sorted by reference
/// exponent so the rewriter can stop at its threshold.
struct CommutatorEntry {
    struct Term {
        Word word;
        PadicScalar a;
        int deg = 0;
        Rational ref;  // v(a) + deg * e_ref
    };
    std::vector<Term> terms;
    std::vector<ErrorLedger> suffix;  // content of terms[k..] plus tail
    bool has_tail = false;
    int D = 0;
};

/// The noncommutative product of a chart, with its commutator table and a
/// cache of monomial products. Copies share the caches.
class Multiplier {
public:
    Multiplier(GroupChart chart, TruncationPolicy pol, bool strict_cap = false)
        : chart_(std::move(chart)), pol_(pol), strict_(strict_cap), state_(std::make_shared<State>()) {
        pol_.validate();
        if (pol_.p != chart_.p()) throw std::invalid_argument("chart and policy use different primes");
        const int d = chart_.dim();
        state_->comm.resize(d * d);
        for (int k = 0; k < d * d; ++k) state_->once.push_back(std::make_unique<std::once_flag>());
        wide_ = max_precision(pol_.p);
        Rational emin = Rational(2 * pol_.mlo) * pol_.eref;
        Rational span = (pol_.T - emin) / pol_.eref;
        comm_degree_ = static_cast<int>(span.ceil()) + 1;
        central_.assign(d, true);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (i != j && chart_.law_int(chart_.unit(i), chart_.unit(j)) != chart_.law_int(chart_.unit(j), chart_.unit(i)))
                    central_[i] = false;
        for (int k = d; k >= 1; --k)
            if (!central_[k - 1]) {
                first_ = k;
                if (last_ == 0) last_ = k;
            }
    }

    const GroupChart& chart() const { return chart_; }
    const TruncationPolicy& policy() const { return pol_; }
    int dim() const { return chart_.dim(); }
    int commutator_degree() const { return comm_degree_; }

    /// Collects one record per swap of later rewriting runs.
    void set_trace(std::vector<PotentialRecord>* sink) { trace_ = sink; }

    /// Commutator entry for 1 <= j < i <= d.
    const CommutatorEntry& commutator(int i, int j) const {
        const int d = dim();
        const int slot = (i - 1) * d + (j - 1);
        std::call_once(*state_->once[slot], [&] { state_->comm[slot] = build_commutator(i, j); });
        return state_->comm[slot];
    }

    /// One rewriting step at the violation t of the term: the swapped head
    /// and every correction from the commutator, untruncated.
    SwapResult swap_expand(const WeightedTerm& in, int t) const {
        SwapResult r;
        r.head = swapped(in, t);
        run_swap(in, t, nullptr, [&](WeightedTerm&& w) { r.corrections.push_back(std::move(w)); }, r.tail);
        return r;
    }

    /// Raw canonical expansion of b^a b^b by the word-rewriting worklist:
    /// the largest bad word is swapped at its first violation until none is
    /// left. Corrections of reference exponent at least T (and bad words beyond
    /// the cap) go to the ledger. Kept as the reference for expand().
    MonomialExpansion expand_worklist(const Monomial& a, const Monomial& b, const Rational& T) const {
        const int d = dim();
        const Rational Tden = T * Rational(pol_.eref.den());
        const std::int64_t tkey = Tden.ceil();
        auto key = [&](int v, int deg) { return static_cast<std::int64_t>(v) * pol_.eref.den() + static_cast<std::int64_t>(deg) * pol_.eref.num(); };

        Word w0 = canonical_word(a);
        for (auto l : canonical_word(b)) push_letter(w0, l);

        LaurentSeries::TermMap out;
        ErrorLedger led;
        std::map<Word, PadicScalar> pending;
        std::set<std::pair<std::int64_t, Word>> queue;

        auto push = [&](PadicScalar c, Word w, bool correction) {
            if (c.is_exact_zero()) return;
            const int deg = word_degree(w);
            if (c.is_zero()) {
                led.add_inside(deg, c.valuation());
                return;
            }
            if (correction && key(c.valuation(), deg) >= tkey) {
                led.add_inside(deg, c.valuation());
                return;
            }
            if (is_canonical(w)) {
                Monomial m = word_exponents(w, d);
                auto [it, fresh] = out.emplace(std::move(m), c);
                if (!fresh) it->second += c;
                return;
            }
            if (correction && over_cap(w)) {
                if (strict_) throw CapOverflow("correction word " + word_str(w) + " exceeds the coordinate cap");
                led.add_inside(deg, c.valuation());
                return;
            }
            auto it = pending.find(w);
            if (it == pending.end()) {
                queue.emplace(key(c.valuation(), deg), w);
                pending.emplace(std::move(w), c);
                return;
            }
            queue.erase({key(it->second.valuation(), deg), w});
            PadicScalar s = it->second + c;
            if (s.is_zero()) {
                if (!s.is_exact_zero()) led.add_inside(deg, s.valuation());
                pending.erase(it);
                return;
            }
            it->second = s;
            queue.emplace(key(s.valuation(), deg), std::move(w));
        };

        push(PadicScalar::one(pol_.p, wide_), std::move(w0), false);
        std::size_t steps = 0;
        while (!queue.empty()) {
            if (++steps > kMaxSteps) throw std::runtime_error("rewriting exceeded its step budget");
            auto node = queue.extract(queue.begin());
            Word w = std::move(node.value().second);
            auto pit = pending.find(w);
            WeightedTerm in{pit->second, std::move(w)};
            pending.erase(pit);
            const int t = first_violation(in.word);
            WeightedTerm head = swapped(in, t);
            if (trace_) {
                PotentialRecord rec{in.word, potential(in.coeff, in.word, d), potential(head.coeff, head.word, d), 0,
                                    disorder(in.word), disorder(head.word)};
                rec.f_corr_min = rec.f_in;
                bool first = true;
                ErrorLedger unused;
                run_swap(in, t, nullptr, [&](WeightedTerm&& c) {
                    int f = potential(c.coeff, c.word, d);
                    rec.f_corr_min = first ? f : std::min(rec.f_corr_min, f);
                    first = false;
                }, unused);
                trace_->push_back(std::move(rec));
            }
            run_swap(in, t, &T, [&](WeightedTerm&& c) { push(std::move(c.coeff), std::move(c.word), true); }, led);
            push(std::move(head.coeff), std::move(head.word), false);
        }

        MonomialExpansion r;
        r.terms.assign(out.begin(), out.end());
        r.ledger = std::move(led);
        return r;
    }

    /// Raw canonical expansion of b^a b^b with the same swap identities,
    /// organised as successive products of a canonical series by one letter
    /// of b^b. Each product b^c * letter is memoised, so intermediate words
    /// never leave the canonical form.
    MonomialExpansion expand(const Monomial& a, const Monomial& b, const Rational& T) const {
        return expand_ticks(a, b, ticks(T));
    }

    /// Cached expand().
    std::shared_ptr<const MonomialExpansion> expansion(const Monomial& a, const Monomial& b, const Rational& T) const {
        return expansion_ticks(a, b, ticks(T));
    }

    /// Canonical expansion of b^a b^b truncated by the policy.
    LaurentSeries monomial_product(const Monomial& a, const Monomial& b) const {
        auto ex = expansion(a, b, pol_.T);
        return LaurentSeries::from_terms(dim(), pol_, to_map(ex->terms), ex->ledger);
    }

    /// Bilinear extension over all pairs of stored terms. The pair with
    /// coefficient c is rewritten down to reference exponent T - v(c).
    LaurentSeries series_product(const LaurentSeries& x, const LaurentSeries& y) const {
        check_compatible(x, y);
        if (x.dim() != dim()) throw std::invalid_argument("series dimension differs from the chart");
        TruncationPolicy pol = intersect(intersect(x.policy(), y.policy()), pol_);
        const std::int64_t t = ticks(pol.T);
        auto pairs = term_pairs(x, y);
        std::vector<std::shared_ptr<const MonomialExpansion>> ex(pairs.size());
        parallel_for(pairs.size(), [&](std::size_t k) {
            ex[k] = expansion_ticks(*pairs[k].a, *pairs[k].b, t - vticks(pairs[k].c.valuation()));
        });
        std::vector<const MonomialExpansion*> ptr(ex.size());
        for (std::size_t k = 0; k < ex.size(); ++k) ptr[k] = ex[k].get();
        return assemble_product(x, y, pairs, ptr, pol);
    }

    /// Whether b_k commutes with every generator.
    bool central(int k) const { return central_[k - 1]; }

    std::size_t cache_size() const {
        std::shared_lock lk(state_->cache_mu);
        return state_->cache.size();
    }

private:
    static constexpr std::size_t kMaxSteps = 50'000'000;

    struct ExpansionKey {
        Monomial a, b;
        std::int64_t T;
        bool operator==(const ExpansionKey&) const = default;
    };
    struct LetterKey {
        Monomial a;
        std::int8_t letter;
        std::int64_t T;
        bool operator==(const LetterKey&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const ExpansionKey& k) const noexcept {
            return MonomialHash{}(k.a) * 31 + MonomialHash{}(k.b) * 7 + static_cast<std::size_t>(k.T);
        }
        std::size_t operator()(const LetterKey& k) const noexcept {
            return MonomialHash{}(k.a) * 31 + static_cast<std::size_t>(k.letter) * 1000003 + static_cast<std::size_t>(k.T);
        }
    };

    struct State {
        std::vector<std::unique_ptr<std::once_flag>> once;
        std::vector<CommutatorEntry> comm;
        mutable std::shared_mutex cache_mu;
        std::unordered_map<ExpansionKey, std::shared_ptr<const MonomialExpansion>, KeyHash> cache;
        mutable std::shared_mutex letter_mu;
        std::unordered_map<LetterKey, std::shared_ptr<const MonomialExpansion>, KeyHash> letters;
    };

    /// A canonical series under construction.
    struct Partial {
        std::unordered_map<Monomial, PadicScalar, MonomialHash> terms;
        ErrorLedger ledger;
    };

    // Thresholds are kept in ticks of 1/den(e_ref): a term of valuation v and
    // degree m has reference exponent (v den + m num) ticks, and it is dropped
    // against T' exactly when that reaches ceil(T' den).
    std::int64_t ticks(const Rational& T) const { return (T * Rational(pol_.eref.den())).ceil(); }
    std::int64_t vticks(int v) const { return static_cast<std::int64_t>(v) * pol_.eref.den(); }
    std::int64_t dticks(int deg) const { return static_cast<std::int64_t>(deg) * pol_.eref.num(); }
    std::int64_t ref_ticks(int v, int deg) const { return vticks(v) + dticks(deg); }

    /// Splits off the central coordinates of a; returns their degree.
    int strip_central(Monomial& a, Monomial& shift) const {
        int deg = 0;
        for (int k = 0; k < dim(); ++k)
            if (central_[k] && a[k] != 0) {
                shift[k] += a[k];
                deg += a[k];
                a[k] = 0;
            }
        return deg;
    }

    /// Outside content of a core is only known to stay outside when the
    /// central shift is at least -2A; otherwise it is counted as inside.
    MonomialExpansion shifted(const MonomialExpansion& ex, const Monomial& shift, int deg) const {
        MonomialExpansion r;
        r.terms.reserve(ex.terms.size());
        for (const auto& [g, c] : ex.terms) r.terms.emplace_back(g + shift, c);
        bool low = false;
        for (int k = 0; k < dim(); ++k) low = low || (central_[k] && shift[k] < -2 * pol_.A);
        if (low) {
            r.ledger.absorb_inside(ex.ledger.all(), deg, 0);
        } else {
            r.ledger = ex.ledger.shifted(deg, 0);
        }
        return r;
    }

    /// b_F^x b^g and b^g b_K^y are canonical for F the first and K the last
    /// non-central generator, so these factors (and central ones) only shift
    /// the expansion. Returns the shift degree.
    int strip_outer(Monomial& a, Monomial& b, Monomial& shift) const {
        int sdeg = strip_central(a, shift) + strip_central(b, shift);
        if (first_ > 0 && a[first_ - 1] != 0) {
            shift[first_ - 1] += a[first_ - 1];
            sdeg += a[first_ - 1];
            a[first_ - 1] = 0;
        }
        if (last_ > 0 && b[last_ - 1] != 0) {
            shift[last_ - 1] += b[last_ - 1];
            sdeg += b[last_ - 1];
            b[last_ - 1] = 0;
        }
        return sdeg;
    }

    MonomialExpansion expand_ticks(const Monomial& a0, const Monomial& b0, std::int64_t T) const {
        Monomial a = a0, b = b0, shift(dim(), 0);
        int sdeg = strip_outer(a, b, shift);
        if (a != a0 || b != b0) return shifted(*core_expansion(a, b, T - dticks(sdeg)), shift, sdeg);
        return expand_core(a, b, T);
    }

    MonomialExpansion expand_core(const Monomial& a, const Monomial& b, std::int64_t T) const {
        Partial s;
        s.terms.emplace(a, PadicScalar::one(pol_.p, wide_));
        Word letters = canonical_word(b);
        int rest = word_degree(letters);
        Monomial principal = a;
        for (auto l : letters) {
            rest -= l > 0 ? 1 : -1;
            principal[letter_index(l) - 1] += l > 0 ? 1 : -1;
            s = times_letter(s, l, T - dticks(rest), &principal);
        }
        return finish(std::move(s));
    }

    /// Only products with nothing left to strip are cached; the rest are
    /// shifted copies.
    std::shared_ptr<const MonomialExpansion> expansion_ticks(const Monomial& a0, const Monomial& b0,
                                                             std::int64_t T) const {
        Monomial a = a0, b = b0, shift(dim(), 0);
        int sdeg = strip_outer(a, b, shift);
        if (a != a0 || b != b0)
            return std::make_shared<const MonomialExpansion>(shifted(*core_expansion(a, b, T - dticks(sdeg)), shift, sdeg));
        return core_expansion(a, b, T);
    }

    std::shared_ptr<const MonomialExpansion> core_expansion(const Monomial& a, const Monomial& b, std::int64_t T) const {
        ExpansionKey k{a, b, T};
        {
            std::shared_lock lk(state_->cache_mu);
            auto it = state_->cache.find(k);
            if (it != state_->cache.end()) return it->second;
        }
        auto ex = std::make_shared<const MonomialExpansion>(expand_core(a, b, T));
        std::unique_lock lk(state_->cache_mu);
        return state_->cache.emplace(std::move(k), std::move(ex)).first->second;
    }

    /// b^a * b_j^e as a canonical series, corrections below T ticks; memoised.
    std::shared_ptr<const MonomialExpansion> letter_product(const Monomial& a, std::int8_t letter,
                                                            std::int64_t T) const {
        LetterKey k{a, letter, T};
        {
            std::shared_lock lk(state_->letter_mu);
            auto it = state_->letters.find(k);
            if (it != state_->letters.end()) return it->second;
        }
        auto ex = std::make_shared<const MonomialExpansion>(compute_letter_product(a, letter, T));
        std::unique_lock lk(state_->letter_mu);
        return state_->letters.emplace(std::move(k), std::move(ex)).first->second;
    }

    /// s * letter, keeping terms below T ticks. The principal term (if given)
    /// is never dropped; other terms go to the ledger when they cancel, fall
    /// below the threshold or exceed the cap.
    Partial times_letter(const Partial& s, std::int8_t letter, std::int64_t T, const Monomial* principal) const {
        Partial r;
        const int step = letter > 0 ? 1 : -1;
        r.ledger = s.ledger.shifted(step, 0);
        for (const auto& [m, c] : s.terms) {
            auto ex = letter_product(m, letter, T - vticks(c.valuation()));
            for (const auto& [g, a] : ex->terms) {
                PadicScalar t = c * a;
                auto [it, fresh] = r.terms.emplace(g, t);
                if (!fresh) it->second += t;
            }
            if (!ex->ledger.empty()) r.ledger.absorb(ex->ledger, 0, c.valuation());
        }
        prune(r, T, principal);
        return r;
    }

    void prune(Partial& r, std::int64_t T, const Monomial* principal) const {
        for (auto it = r.terms.begin(); it != r.terms.end();) {
            const PadicScalar& c = it->second;
            const int deg = degree(it->first);
            bool keep = true;
            if (c.is_exact_zero()) {
                keep = false;
            } else if (c.is_zero()) {
                r.ledger.add_inside(deg, c.valuation());
                keep = false;
            } else if (!principal || it->first != *principal) {
                if (ref_ticks(c.valuation(), deg) >= T) {
                    r.ledger.add_inside(deg, c.valuation());
                    keep = false;
                } else if (beyond_central_cap(it->first)) {
                    r.ledger.add_outside(deg, c.valuation());
                    keep = false;
                } else if (over_work_cap(it->first)) {
                    if (strict_) throw CapOverflow("correction term " + monomial_str(it->first) + " exceeds the coordinate cap");
                    r.ledger.add_inside(deg, c.valuation());
                    keep = false;
                }
            }
            it = keep ? std::next(it) : r.terms.erase(it);
        }
    }

    /// b^a b_j^e: with k the last generator after j present in a and s its
    /// sign, b^a b_j^e = (b^(a - s e_k) b_j^e) b_k^s + e s b^(a - s e_k) W,
    /// W running over the wrapped commutator terms of (k, j). Central
    /// generators are moved out of the way first.
    MonomialExpansion compute_letter_product(const Monomial& a0, std::int8_t letter, std::int64_t T) const {
        const int d = dim();
        const int j = letter_index(letter);
        const int e = letter > 0 ? 1 : -1;
        Monomial a = a0, shift(d, 0);
        if (!central_[j - 1]) {
            int sdeg = strip_central(a, shift);
            if (a[first_ - 1] != 0) {
                shift[first_ - 1] += a[first_ - 1];
                sdeg += a[first_ - 1];
                a[first_ - 1] = 0;
            }
            if (a != a0) return shifted(*letter_product(a, letter, T - dticks(sdeg)), shift, sdeg);
        }
        int k = 0;
        if (!central_[j - 1])
            for (int q = d; q > j; --q)
                if (a[q - 1] != 0) {
                    k = q;
                    break;
                }
        Monomial head = a;
        head[j - 1] += e;
        if (k == 0) {
            MonomialExpansion r;
            r.terms.emplace_back(std::move(head), PadicScalar::one(pol_.p, wide_));
            return r;
        }
        const int s = a[k - 1] > 0 ? 1 : -1;
        const auto lk = static_cast<std::int8_t>(s * k);
        Monomial rest = a;
        rest[k - 1] -= s;

        Partial out;
        {
            Partial first;
            auto ex = letter_product(rest, letter, T - dticks(s));
            first.terms.insert(ex->terms.begin(), ex->terms.end());
            first.ledger = ex->ledger;
            out = times_letter(first, lk, T, &head);
        }

        const CommutatorEntry& comm = commutator(k, j);
        const int base_deg = degree(a) + e - 2;
        const std::int64_t base = dticks(base_deg);
        const PadicScalar sign = PadicScalar::from_int(pol_.p, s * e, wide_);
        for (std::size_t q = 0; q < comm.terms.size(); ++q) {
            const auto& term = comm.terms[q];
            if (base + ref_ticks(term.a.valuation(), term.deg) >= T) {
                out.ledger.absorb_inside(comm.suffix[q].inside(), base_deg, 0);
                break;
            }
            Word w;
            if (s < 0) w.push_back(static_cast<std::int8_t>(-k));
            if (e < 0) w.push_back(static_cast<std::int8_t>(-j));
            w.insert(w.end(), term.word.begin(), term.word.end());
            if (e < 0) w.push_back(static_cast<std::int8_t>(-j));
            if (s < 0) w.push_back(static_cast<std::int8_t>(-k));
            Partial c;
            c.terms.emplace(rest, sign * term.a);
            int left = word_degree(w);
            for (auto l : w) {
                left -= l > 0 ? 1 : -1;
                c = times_letter(c, l, T - dticks(left), nullptr);
            }
            for (const auto& [g, x] : c.terms) {
                auto [it, fresh] = out.terms.emplace(g, x);
                if (!fresh) it->second += x;
            }
            out.ledger.merge(c.ledger);
        }
        if (comm.has_tail) out.ledger.add_inside(base_deg + comm.D + 1, 0);
        prune(out, T, &head);

        return finish(std::move(out));
    }

    static MonomialExpansion finish(Partial&& s) {
        MonomialExpansion r;
        r.terms.assign(s.terms.begin(), s.terms.end());
        std::sort(r.terms.begin(), r.terms.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        r.ledger = std::move(s.ledger);
        return r;
    }

    static LaurentSeries::TermMap to_map(const std::vector<std::pair<Monomial, PadicScalar>>& v) {
        return LaurentSeries::TermMap(v.begin(), v.end());
    }

    /// Intermediate terms may exceed the output cap A: a product of two capped
    /// monomials reaches 2A before its corrections bring it back.
    int work_cap() const { return 2 * pol_.A; }

    /// Central exponents only grow during collection, and the stripped shift
    /// of factors within the cap is at least -2A; past 3A the term can only
    /// reach monomials outside the window.
    bool beyond_central_cap(const Monomial& g) const {
        for (int k = 0; k < dim(); ++k)
            if (central_[k] && g[k] > 3 * pol_.A) return true;
        return false;
    }
    bool over_work_cap(const Monomial& g) const {
        for (int k = 0; k < dim(); ++k)
            if (std::abs(g[k]) > (central_[k] && g[k] > 0 ? 3 * pol_.A : work_cap())) return true;
        return false;
    }

    bool over_cap(const Word& w) const {
        Monomial m = word_exponents(w, dim());
        return std::any_of(m.begin(), m.end(), [&](int x) { return std::abs(x) > work_cap(); });
    }

    CommutatorEntry build_commutator(int i, int j) const {
        CommutatorEntry e;
        e.D = comm_degree_;
        ExactExpansion ex = exact_commutator(chart_, i - 1, j - 1, e.D);
        e.has_tail = ex.has_tail;
        for (const auto& [g, a] : ex.terms) {
            PadicScalar c = PadicScalar::from_int(pol_.p, a, wide_);
            int deg = degree(g);
            e.terms.push_back({canonical_word(g), c, deg, pol_.ref_exponent(c.valuation(), deg)});
        }
        std::stable_sort(e.terms.begin(), e.terms.end(), [](const auto& x, const auto& y) {
            if (x.ref != y.ref) return x.ref < y.ref;
            return x.word < y.word;
        });
        e.suffix.resize(e.terms.size() + 1);
        if (e.has_tail) e.suffix.back().add_inside(e.D + 1, 0);
        for (std::size_t k = e.terms.size(); k-- > 0;) {
            e.suffix[k] = e.suffix[k + 1];
            e.suffix[k].add_inside(e.terms[k].deg, e.terms[k].a.valuation());
        }
        return e;
    }

    static WeightedTerm swapped(const WeightedTerm& in, int t) {
        Word w;
        w.reserve(in.word.size());
        for (int k = 0; k < static_cast<int>(in.word.size()); ++k) {
            if (k == t)
                push_letter(w, in.word[t + 1]);
            else if (k == t + 1)
                push_letter(w, in.word[t]);
            else
                push_letter(w, in.word[k]);
        }
        return {in.coeff, std::move(w)};
    }

    /// Emits c a_g e f * prefix [x^-1][y^-1] b^g [y^-1][x^-1] suffix for the
    /// commutator terms a_g b^g of x = x_t, y = x_(t+1). With a threshold,
    /// stops at the first term of reference exponent >= T and books the rest.
    template <class Emit>
    void run_swap(const WeightedTerm& in, int t, const Rational* T, Emit&& emit, ErrorLedger& led) const {
        const std::int8_t lx = in.word[t], ly = in.word[t + 1];
        const int x = letter_index(lx), y = letter_index(ly);
        const int e = lx > 0 ? 1 : -1, f = ly > 0 ? 1 : -1;
        const CommutatorEntry& comm = commutator(x, y);
        const int v = in.coeff.valuation();
        const int base_deg = word_degree(in.word) - 2;
        const Rational base = pol_.ref_exponent(v, base_deg);
        PadicScalar c = in.coeff;
        if (e * f < 0) c = -c;
        for (std::size_t k = 0; k < comm.terms.size(); ++k) {
            const auto& term = comm.terms[k];
            if (T && base + term.ref >= *T) {
                led.absorb_inside(comm.suffix[k].inside(), base_deg, v);
                return;
            }
            Word w;
            w.reserve(in.word.size() + term.word.size() + 4);
            for (int q = 0; q < t; ++q) push_letter(w, in.word[q]);
            if (e < 0) push_letter(w, static_cast<std::int8_t>(-x));
            if (f < 0) push_letter(w, static_cast<std::int8_t>(-y));
            for (auto l : term.word) push_letter(w, l);
            if (f < 0) push_letter(w, static_cast<std::int8_t>(-y));
            if (e < 0) push_letter(w, static_cast<std::int8_t>(-x));
            for (std::size_t q = t + 2; q < in.word.size(); ++q) push_letter(w, in.word[q]);
            emit(WeightedTerm{c * term.a, std::move(w)});
        }
        if (comm.has_tail) led.add_inside(base_deg + comm.D + 1, v);
    }

    GroupChart chart_;
    TruncationPolicy pol_;
    bool strict_ = false;
    int wide_ = 0;
    int comm_degree_ = 0;
    std::vector<bool> central_;
    int first_ = 0;  // first and last non-central generator, 0 if none
    int last_ = 0;
    std::vector<PotentialRecord>* trace_ = nullptr;
    std::shared_ptr<State> state_;
};

}  // namespace robba
