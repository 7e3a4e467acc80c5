#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace sip {

// Dense real polynomial, coefficient k multiplies x^k.
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<double> c) : c_(std::move(c)) { trim(); }
    static Poly constant(double v) { return Poly({v}); }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<double>& coeffs() const { return c_; }
    double coeff(int k) const { return k >= 0 && k < static_cast<int>(c_.size()) ? c_[k] : 0.0; }
    double leading() const { return c_.empty() ? 0.0 : c_.back(); }

    double operator()(double x) const {
        double r = 0.0;
        for (std::size_t k = c_.size(); k-- > 0;) r = r * x + c_[k];
        return r;
    }
    Poly derivative(int times = 1) const;

    friend Poly operator+(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a, const Poly& b);
    friend Poly operator*(const Poly& a, const Poly& b);
    friend Poly operator*(double s, const Poly& a);

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
    }
    std::vector<double> c_;
};

inline Poly Poly::derivative(int times) const {
    std::vector<double> d = c_;
    for (int t = 0; t < times; ++t) {
        if (d.size() <= 1) return Poly();
        std::vector<double> e(d.size() - 1);
        for (std::size_t k = 1; k < d.size(); ++k) e[k - 1] = static_cast<double>(k) * d[k];
        d = std::move(e);
    }
    return Poly(d);
}

inline Poly operator+(const Poly& a, const Poly& b) {
    std::vector<double> c(std::max(a.c_.size(), b.c_.size()), 0.0);
    for (std::size_t k = 0; k < a.c_.size(); ++k) c[k] += a.c_[k];
    for (std::size_t k = 0; k < b.c_.size(); ++k) c[k] += b.c_[k];
    return Poly(c);
}

inline Poly operator-(const Poly& a, const Poly& b) { return a + (-1.0) * b; }

inline Poly operator*(const Poly& a, const Poly& b) {
    if (a.c_.empty() || b.c_.empty()) return Poly();
    std::vector<double> c(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Poly(c);
}

inline Poly operator*(double s, const Poly& a) {
    std::vector<double> c = a.c_;
    for (auto& v : c) v *= s;
    return Poly(c);
}

}  // namespace sip
