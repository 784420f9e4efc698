#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"

namespace heartwood {

/*
 * Basis letters are coded as nonzero ints: +i is the i-th positive letter
 * (1-based), -i its formal inverse.  Enumeration order over A^{+-1} is
 * a < a^-1 < b < b^-1 < ...
 */
class Alphabet {
public:
    Alphabet() = default;
    explicit Alphabet(std::vector<std::string> names) : names_(std::move(names)) {
        if (names_.empty()) throw InputError("alphabet needs at least one letter");
        for (size_t i = 0; i < names_.size(); ++i)
            for (size_t j = i + 1; j < names_.size(); ++j)
                if (names_[i] == names_[j]) throw InputError("alphabet letter names must be distinct");
    }

    static Alphabet standard(int n) {
        if (n < 1 || n > 26) throw InputError("standard alphabet supports 1..26 letters");
        std::vector<std::string> names;
        for (int i = 0; i < n; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
        return Alphabet(std::move(names));
    }

    int size() const { return static_cast<int>(names_.size()); }

    bool valid_letter(int code) const {
        int i = code < 0 ? -code : code;
        return code != 0 && i <= size();
    }

    const std::string& positive_name(int code) const {
        int i = code < 0 ? -code : code;
        if (!valid_letter(code)) throw InputError("letter code out of range");
        return names_[i - 1];
    }

    std::string letter_name(int code) const {
        const std::string& base = positive_name(code);
        if (code > 0) return base;
        if (base.size() == 1 && base[0] >= 'a' && base[0] <= 'z')
            return std::string(1, static_cast<char>(base[0] - 'a' + 'A'));
        return base + "'";
    }

    std::optional<int> parse_letter(const std::string& tok) const {
        for (int i = 1; i <= size(); ++i) {
            if (tok == letter_name(i)) return i;
            if (tok == letter_name(-i)) return -i;
        }
        return std::nullopt;
    }

    // a < a^-1 < b < b^-1 < ...
    int order_key(int code) const {
        int i = code < 0 ? -code : code;
        return (i - 1) * 2 + (code < 0 ? 1 : 0);
    }

    std::vector<int> letters_in_order() const {
        std::vector<int> out;
        for (int i = 1; i <= size(); ++i) {
            out.push_back(i);
            out.push_back(-i);
        }
        return out;
    }

private:
    std::vector<std::string> names_;
};

class ReducedWord {
public:
    ReducedWord() = default;

    static ReducedWord reduce(const std::vector<int>& letters) {
        ReducedWord w;
        for (int z : letters) {
            if (z == 0) throw InputError("letter code 0 is not a letter");
            if (!w.letters_.empty() && w.letters_.back() == -z)
                w.letters_.pop_back();
            else
                w.letters_.push_back(z);
        }
        return w;
    }

    static ReducedWord single(int letter) { return reduce({letter}); }

    int length() const { return static_cast<int>(letters_.size()); }
    bool empty() const { return letters_.empty(); }
    int letter(int i) const { return letters_.at(static_cast<size_t>(i)); }
    const std::vector<int>& letters() const { return letters_; }
    int first() const { return letters_.front(); }
    int last() const { return letters_.back(); }

    ReducedWord inverse() const {
        ReducedWord w;
        for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) w.letters_.push_back(-*it);
        return w;
    }

    friend ReducedWord operator*(const ReducedWord& u, const ReducedWord& v) {
        std::vector<int> cat = u.letters_;
        cat.insert(cat.end(), v.letters_.begin(), v.letters_.end());
        return reduce(cat);
    }

    ReducedWord prefix(int k) const {
        if (k < 0 || k > length()) throw InputError("prefix length out of range");
        ReducedWord w;
        w.letters_.assign(letters_.begin(), letters_.begin() + k);
        return w;
    }

    ReducedWord suffix_from(int k) const {
        if (k < 0 || k > length()) throw InputError("suffix index out of range");
        ReducedWord w;
        w.letters_.assign(letters_.begin() + k, letters_.end());
        return w;
    }

    // Letters i..j-1 (a subword of a reduced word is reduced).
    ReducedWord subword(int i, int j) const {
        if (i < 0 || j < i || j > length()) throw InputError("subword range invalid");
        ReducedWord w;
        w.letters_.assign(letters_.begin() + i, letters_.begin() + j);
        return w;
    }

    // v with the first k and last k letters removed; requires |v| >= 2k.
    ReducedWord chop(int k) const {
        if (k < 0) throw InputError("chop amount must be nonnegative");
        if (length() < 2 * k) throw InputError("chop needs |v| >= 2k");
        return subword(k, length() - k);
    }

    bool is_cyclically_reduced() const {
        return length() < 2 || letters_.front() != -letters_.back();
    }

    // w = u . core . u^-1 with core cyclically reduced; |w| = 2|u| + |core|.
    std::pair<ReducedWord, ReducedWord> cyclic_reduce() const {
        int i = 0, j = length();
        while (j - i >= 2 && letters_[static_cast<size_t>(i)] == -letters_[static_cast<size_t>(j - 1)]) {
            ++i;
            --j;
        }
        return {prefix(i), subword(i, j)};
    }

    ReducedWord pow(int n) const {
        if (n < 0) return inverse().pow(-n);
        ReducedWord out;
        for (int i = 0; i < n; ++i) out = out * *this;
        return out;
    }

    bool has_subword(const ReducedWord& s) const {
        if (s.length() > length()) return false;
        for (int i = 0; i + s.length() <= length(); ++i) {
            bool ok = true;
            for (int j = 0; j < s.length(); ++j)
                if (letters_[static_cast<size_t>(i + j)] != s.letter(j)) {
                    ok = false;
                    break;
                }
            if (ok) return true;
        }
        return false;
    }

    std::string str(const Alphabet& ab) const {
        if (empty()) return "1";
        std::string out;
        for (size_t i = 0; i < letters_.size(); ++i) {
            if (i) out += '.';
            out += ab.letter_name(letters_[i]);
        }
        return out;
    }

    static ReducedWord parse(const Alphabet& ab, const std::string& text) {
        if (text == "1" || text.empty()) return ReducedWord();
        std::vector<int> letters;
        size_t pos = 0;
        while (pos <= text.size()) {
            size_t dot = text.find('.', pos);
            std::string tok = text.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
            auto code = ab.parse_letter(tok);
            if (!code) throw InputError("unknown letter '" + tok + "' in word '" + text + "'");
            letters.push_back(*code);
            if (dot == std::string::npos) break;
            pos = dot + 1;
        }
        ReducedWord w = reduce(letters);
        if (w.length() != static_cast<int>(letters.size()))
            throw InputError("word '" + text + "' is not freely reduced");
        return w;
    }

    friend bool operator==(const ReducedWord& a, const ReducedWord& b) { return a.letters_ == b.letters_; }
    friend bool operator!=(const ReducedWord& a, const ReducedWord& b) { return !(a == b); }
    friend bool operator<(const ReducedWord& a, const ReducedWord& b) { return a.letters_ < b.letters_; }

private:
    std::vector<int> letters_;
};

// Order used for streaming and reports: by length, then lexicographic in the
// alphabet's letter order.
inline bool word_order_less(const Alphabet& ab, const ReducedWord& a, const ReducedWord& b) {
    if (a.length() != b.length()) return a.length() < b.length();
    for (int i = 0; i < a.length(); ++i) {
        int ka = ab.order_key(a.letter(i)), kb = ab.order_key(b.letter(i));
        if (ka != kb) return ka < kb;
    }
    return false;
}

/*
 * Restartable stream of all reduced words of length exactly n, lexicographic
 * in the alphabet's order.  An optional first-letter shard restricts the
 * stream to words starting with that letter, so shards partition the
 * enumeration for independent workers.
 */
class ReducedWordStream {
public:
    ReducedWordStream(const Alphabet& ab, int n, std::optional<int> first_letter = std::nullopt)
        : ab_(ab), n_(n), shard_(first_letter) {
        if (n < 0) throw InputError("word length must be nonnegative");
        if (shard_ && !ab.valid_letter(*shard_)) throw InputError("shard letter out of range");
        restart();
    }

    void restart() {
        done_ = false;
        stack_.clear();
        if (n_ == 0) return;
        if (shard_) stack_.push_back(*shard_);
    }

    std::optional<ReducedWord> next() {
        if (done_) return std::nullopt;
        if (n_ == 0) {
            done_ = true;
            return ReducedWord();
        }
        if (stack_.empty() && !shard_) stack_.push_back(first_letter_choice(0));
        while (true) {
            while (static_cast<int>(stack_.size()) < n_) {
                int next_letter = successor_letter(-stack_.back(), -1);
                stack_.push_back(next_letter);
            }
            ReducedWord w = ReducedWord::reduce(stack_);
            advance();
            return w;
        }
    }

private:
    int first_letter_choice(int after_key) const {
        for (int code : ab_.letters_in_order())
            if (ab_.order_key(code) >= after_key) return code;
        throw InternalError("empty alphabet in stream");
    }

    // Smallest letter (in order) not equal to `forbidden`, with key > after_key.
    int successor_letter(int forbidden, int after_key) const {
        for (int code : ab_.letters_in_order()) {
            if (ab_.order_key(code) <= after_key) continue;
            if (code == forbidden) continue;
            return code;
        }
        return 0; // exhausted
    }

    void advance() {
        while (!stack_.empty()) {
            int cur = stack_.back();
            stack_.pop_back();
            if (static_cast<int>(stack_.size()) == 0 && shard_) break;
            int forbidden = stack_.empty() ? 0 : -stack_.back();
            int nxt = successor_letter(forbidden, ab_.order_key(cur));
            if (nxt != 0) {
                stack_.push_back(nxt);
                return;
            }
        }
        done_ = true;
    }

    Alphabet ab_;
    int n_;
    std::optional<int> shard_;
    std::vector<int> stack_;
    bool done_ = false;
};

inline std::vector<ReducedWord> enumerate_reduced(const Alphabet& ab, int n,
                                                  std::optional<int> shard = std::nullopt) {
    ReducedWordStream st(ab, n, shard);
    std::vector<ReducedWord> out;
    while (auto w = st.next()) out.push_back(*w);
    return out;
}

/*
 * Deterministic producer of the prefixes of a one-sided infinite reduced
 * word.  Prefixes are nested by construction; explicit generators raise a
 * depth error beyond their data.
 */
class InfiniteWordGen {
public:
    static InfiniteWordGen periodic(const ReducedWord& w) {
        if (w.empty()) throw InputError("periodic word generator needs a nonempty period");
        if (!w.is_cyclically_reduced()) throw InputError("periodic word must be cyclically reduced");
        auto impl = std::make_shared<Impl>();
        impl->kind = Kind::Periodic;
        impl->period = w;
        return InfiniteWordGen(std::move(impl));
    }

    // Fixed point of a substitution on positive letters; rules[seed] must
    // start with seed so the iteration is prefix-stable.
    static InfiniteWordGen substitution(const std::map<int, ReducedWord>& rules, int seed) {
        auto impl = std::make_shared<Impl>();
        impl->kind = Kind::Substitution;
        impl->rules = rules;
        impl->seed = seed;
        auto it = rules.find(seed);
        if (it == rules.end() || it->second.empty() || it->second.letter(0) != seed)
            throw InputError("substitution must map the seed to a word starting with the seed");
        for (const auto& [z, img] : rules) {
            if (z <= 0) throw InputError("substitution rules are indexed by positive letters");
            if (img.empty()) throw InputError("substitution images must be nonempty");
        }
        impl->expansion = {seed};
        return InfiniteWordGen(std::move(impl));
    }

    static InfiniteWordGen explicit_word(const ReducedWord& w) {
        auto impl = std::make_shared<Impl>();
        impl->kind = Kind::Explicit;
        impl->period = w;
        return InfiniteWordGen(std::move(impl));
    }

    // The suffix obtained by dropping the first k letters.
    InfiniteWordGen suffix(int k) const {
        if (k < 0) throw InputError("suffix drop must be nonnegative");
        if (k == 0) return *this;
        auto impl = std::make_shared<Impl>();
        impl->kind = Kind::Suffix;
        if (impl_->kind == Kind::Suffix) {
            impl->base = impl_->base;
            impl->drop = impl_->drop + k;
        } else {
            impl->base = impl_;
            impl->drop = k;
        }
        return InfiniteWordGen(std::move(impl));
    }

    // z prepended; requires no cancellation against the current first letter.
    InfiniteWordGen prepend(int z) const {
        if (prefix(1).letter(0) == -z) throw InputError("prepend would cancel against the first letter");
        auto impl = std::make_shared<Impl>();
        impl->kind = Kind::Prepend;
        impl->base = impl_;
        impl->seed = z;
        return InfiniteWordGen(std::move(impl));
    }

    ReducedWord prefix(int n) const {
        if (n < 0) throw InputError("prefix length must be nonnegative");
        return impl_->prefix(n);
    }

    int first_letter() const { return prefix(1).letter(0); }

private:
    enum class Kind { Periodic, Substitution, Explicit, Suffix, Prepend };

    struct Impl {
        Kind kind;
        ReducedWord period;               // periodic / explicit payload
        std::map<int, ReducedWord> rules; // substitution
        int seed = 0;                     // substitution seed / prepended letter
        std::shared_ptr<const Impl> base; // suffix / prepend
        int drop = 0;
        mutable std::vector<int> expansion; // substitution memo

        ReducedWord prefix(int n) const {
            switch (kind) {
                case Kind::Periodic: {
                    std::vector<int> letters;
                    letters.reserve(static_cast<size_t>(n));
                    for (int i = 0; i < n; ++i) letters.push_back(period.letter(i % period.length()));
                    return ReducedWord::reduce(letters);
                }
                case Kind::Explicit: {
                    if (n > period.length())
                        throw DepthError("explicit word generator exhausted at length " +
                                         std::to_string(period.length()));
                    return period.prefix(n);
                }
                case Kind::Substitution: {
                    while (static_cast<int>(expansion.size()) < n) {
                        std::vector<int> next;
                        for (int z : expansion) {
                            auto it = rules.find(z);
                            if (it == rules.end()) throw InputError("substitution rule missing for a letter");
                            for (int y : it->second.letters()) next.push_back(y);
                        }
                        if (next.size() <= expansion.size())
                            throw InputError("substitution does not grow; no infinite fixed point");
                        expansion = std::move(next);
                    }
                    ReducedWord w;
                    std::vector<int> letters(expansion.begin(), expansion.begin() + n);
                    w = ReducedWord::reduce(letters);
                    if (w.length() != n) throw InputError("substitution fixed point is not reduced");
                    return w;
                }
                case Kind::Suffix:
                    return base->prefix(n + drop).suffix_from(drop);
                case Kind::Prepend: {
                    if (n == 0) return ReducedWord();
                    ReducedWord tail = base->prefix(n - 1);
                    std::vector<int> letters{seed};
                    for (int z : tail.letters()) letters.push_back(z);
                    ReducedWord w = ReducedWord::reduce(letters);
                    internal_check(w.length() == n, "prepend produced cancellation");
                    return w;
                }
            }
            throw InternalError("unknown word generator kind");
        }
    };

    explicit InfiniteWordGen(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

    std::shared_ptr<const Impl> impl_;
};

// Fixed point of b -> ba, a -> b: b, ba, bab, babba, ... (prefix-stable).
inline InfiniteWordGen fib_gen(int a_letter = 1, int b_letter = 2) {
    std::map<int, ReducedWord> rules;
    rules[b_letter] = ReducedWord::reduce({b_letter, a_letter});
    rules[a_letter] = ReducedWord::reduce({b_letter});
    return InfiniteWordGen::substitution(rules, b_letter);
}

/*
 * A biinfinite reduced word held as its two halves Z^- and Z^+ with distinct
 * initial letters, marker at index 1.  shift moves the marker:
 *   sigma(X^-1 . Y) = X^-1 Y_1 . (Y_1^-1 Y)
 */
struct BiinfiniteWord {
    InfiniteWordGen neg; // Z^-
    InfiniteWordGen pos; // Z^+

    BiinfiniteWord(InfiniteWordGen neg_half, InfiniteWordGen pos_half)
        : neg(std::move(neg_half)), pos(std::move(pos_half)) {
        if (neg.first_letter() == pos.first_letter())
            throw InputError("biinfinite word halves must have distinct initial letters");
    }

    BiinfiniteWord flipped() const { return BiinfiniteWord(pos, neg); }

    BiinfiniteWord shift(int steps) const {
        BiinfiniteWord z = *this;
        for (; steps > 0; --steps) {
            int y1 = z.pos.first_letter();
            z = BiinfiniteWord(z.neg.prepend(-y1), z.pos.suffix(1));
        }
        for (; steps < 0; ++steps) {
            int x1 = z.neg.first_letter();
            z = BiinfiniteWord(z.neg.suffix(1), z.pos.prepend(-x1));
        }
        return z;
    }

    bool equal_to_depth(const BiinfiniteWord& other, int n) const {
        return neg.prefix(n) == other.neg.prefix(n) && pos.prefix(n) == other.pos.prefix(n);
    }
};

} // namespace heartwood
