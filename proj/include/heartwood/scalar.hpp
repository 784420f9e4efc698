#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>
#include <cmath>
#include <iosfwd>
#include <sstream>
#include <string>

#include "errors.hpp"

namespace heartwood {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::rational<Int>;

/*
 * Exact scalar a + b*sqrt(d), with a, b rational and d a fixed positive
 * non-square integer per context.  d == 0 encodes a plain rational (then
 * b == 0).  Every metric quantity in the library is a Scalar, so comparison
 * must be exact and total:
 *
 *   sign(a + b*sqrt(d)):
 *     same signs of a, b        -> that sign
 *     a > 0, b < 0              -> sign(a^2 - b^2 d)
 *     a < 0, b > 0              -> -sign(a^2 - b^2 d)
 *
 * a^2 = b^2 d with b != 0 would force sqrt(d) rational, so the mixed cases
 * never return 0.
 */
class Scalar {
public:
    Scalar() : a_(0), b_(0), d_(0) {}
    Scalar(int v) : a_(v), b_(0), d_(0) {}          // NOLINT(google-explicit-constructor)
    Scalar(const Rat& a) : a_(a), b_(0), d_(0) {}   // NOLINT(google-explicit-constructor)
    Scalar(Rat a, Rat b, long d) : a_(std::move(a)), b_(std::move(b)), d_(d) {
        if (b_ == Rat(0)) d_ = 0;
        else if (d_ <= 0) throw InputError("quadratic scalar needs positive d");
        else if (is_square(d_)) throw InputError("quadratic scalar: d must not be a perfect square");
    }

    static Scalar rational(long p, long q = 1) { return Scalar(Rat(Int(p), Int(q))); }
    static Scalar quadratic(Rat a, Rat b, long d) { return Scalar(std::move(a), std::move(b), d); }

    const Rat& rat_part() const { return a_; }
    const Rat& quad_part() const { return b_; }
    long quad_base() const { return d_; }
    bool is_rational() const { return b_ == Rat(0); }

    int sign() const {
        const int sa = sgn(a_), sb = sgn(b_);
        if (sb == 0) return sa;
        if (sa == 0) return sb;
        if (sa == sb) return sa;
        const int s = sgn(a_ * a_ - b_ * b_ * Rat(Int(d_)));
        internal_check(s != 0, "sqrt(d) compared equal to a rational");
        return sa > 0 ? s : -s;
    }

    friend Scalar operator+(const Scalar& x, const Scalar& y) {
        long d = merge_base(x, y);
        return make(x.a_ + y.a_, x.b_ + y.b_, d);
    }
    friend Scalar operator-(const Scalar& x, const Scalar& y) {
        long d = merge_base(x, y);
        return make(x.a_ - y.a_, x.b_ - y.b_, d);
    }
    friend Scalar operator*(const Scalar& x, const Scalar& y) {
        long d = merge_base(x, y);
        const Rat rd{Int(d)};
        return make(x.a_ * y.a_ + x.b_ * y.b_ * rd, x.a_ * y.b_ + x.b_ * y.a_, d);
    }
    friend Scalar operator/(const Scalar& x, const Scalar& y) {
        if (y.sign() == 0) throw InputError("scalar division by zero");
        long d = merge_base(x, y);
        const Rat rd{Int(d)};
        const Rat n = y.a_ * y.a_ - y.b_ * y.b_ * rd; // conjugate norm, nonzero
        return make((x.a_ * y.a_ - x.b_ * y.b_ * rd) / n, (x.b_ * y.a_ - x.a_ * y.b_) / n, d);
    }
    Scalar operator-() const { return make(-a_, -b_, d_); }
    Scalar& operator+=(const Scalar& y) { return *this = *this + y; }
    Scalar& operator-=(const Scalar& y) { return *this = *this - y; }
    Scalar& operator*=(const Scalar& y) { return *this = *this * y; }
    Scalar& operator/=(const Scalar& y) { return *this = *this / y; }

    friend bool operator==(const Scalar& x, const Scalar& y) { return (x - y).sign() == 0; }
    friend bool operator!=(const Scalar& x, const Scalar& y) { return !(x == y); }
    friend bool operator<(const Scalar& x, const Scalar& y) { return (x - y).sign() < 0; }
    friend bool operator>(const Scalar& x, const Scalar& y) { return (x - y).sign() > 0; }
    friend bool operator<=(const Scalar& x, const Scalar& y) { return (x - y).sign() <= 0; }
    friend bool operator>=(const Scalar& x, const Scalar& y) { return (x - y).sign() >= 0; }

    Scalar abs() const { return sign() < 0 ? -*this : *this; }

    // "p/q" or "p/q+r/s*sqrt(d)"; used for logs and DOT labels.
    std::string str() const {
        std::ostringstream os;
        os << rat_str(a_);
        if (b_ != Rat(0)) {
            os << (sgn(b_) < 0 ? "-" : "+") << rat_str(boost::abs(b_)) << "*sqrt(" << d_ << ")";
        }
        return os.str();
    }

    double approx() const {
        double v = rat_approx(a_);
        if (b_ != Rat(0)) v += rat_approx(b_) * std::sqrt(static_cast<double>(d_));
        return v;
    }

    static int sgn(const Rat& r) {
        if (r.numerator() == 0) return 0;
        return r.numerator() < 0 ? -1 : 1;
    }

    static std::string rat_str(const Rat& r) {
        std::ostringstream os;
        os << r.numerator();
        if (r.denominator() != 1) os << "/" << r.denominator();
        return os.str();
    }

private:
    static Scalar make(Rat a, Rat b, long d) {
        Scalar s;
        s.a_ = std::move(a);
        s.b_ = std::move(b);
        s.d_ = (s.b_ == Rat(0)) ? 0 : d;
        return s;
    }

    static long merge_base(const Scalar& x, const Scalar& y) {
        if (x.d_ == 0) return y.d_;
        if (y.d_ == 0) return x.d_;
        if (x.d_ != y.d_) throw InternalError("mixed quadratic bases in scalar arithmetic");
        return x.d_;
    }

    static bool is_square(long d) {
        long r = static_cast<long>(std::sqrt(static_cast<double>(d)));
        for (long k = r > 1 ? r - 1 : 0; k <= r + 1; ++k)
            if (k * k == d) return true;
        return false;
    }

    static double rat_approx(const Rat& r) {
        return r.numerator().convert_to<double>() / r.denominator().convert_to<double>();
    }

    Rat a_, b_;
    long d_;
};

inline Scalar min(const Scalar& x, const Scalar& y) { return x <= y ? x : y; }
inline Scalar max(const Scalar& x, const Scalar& y) { return x >= y ? x : y; }

inline std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.str(); }

// Parses "p", "p/q", as emitted by Scalar::rat_str; a leading '+' is allowed.
inline Rat parse_rat(const std::string& raw) {
    const std::string text = (!raw.empty() && raw[0] == '+') ? raw.substr(1) : raw;
    auto bad = [&] { throw InputError("malformed rational '" + raw + "'"); };
    auto slash = text.find('/');
    try {
        Int p(text.substr(0, slash));
        Int q = slash == std::string::npos ? Int(1) : Int(text.substr(slash + 1));
        if (q == 0) bad();
        return Rat(p, q);
    } catch (const std::exception&) {
        bad();
    }
    return Rat(0); // unreachable
}

} // namespace heartwood
