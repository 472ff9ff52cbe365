#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace backreaction {

/// Dense univariate polynomial with coefficients of type T in ascending
/// degree order. Arithmetic is exact in T: no tolerance-based trimming, only
/// coefficients exactly equal to T(0) are dropped. Instantiated with double,
/// std::complex<double>, and (in tests) exact rationals.
template <class T>
class Polynomial {
  public:
    Polynomial() = default;

    explicit Polynomial(std::vector<T> coeffs) : c_(std::move(coeffs)) { trim(); }

    Polynomial(std::initializer_list<T> coeffs) : c_(coeffs) { trim(); }

    static Polynomial constant(const T& value) { return Polynomial{std::vector<T>{value}}; }

    [[nodiscard]] bool is_zero() const { return c_.empty(); }

    /// Degree; -1 for the zero polynomial.
    [[nodiscard]] int degree() const { return static_cast<int>(c_.size()) - 1; }

    [[nodiscard]] const std::vector<T>& coefficients() const { return c_; }

    [[nodiscard]] T coefficient(std::size_t k) const {
        return k < c_.size() ? c_[k] : T(0);
    }

    [[nodiscard]] T evaluate(const T& t) const {
        T acc(0);
        for (std::size_t i = c_.size(); i-- > 0;) acc = acc * t + c_[i];
        return acc;
    }

    [[nodiscard]] Polynomial derivative() const {
        if (c_.size() <= 1) return {};
        std::vector<T> d(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * T(static_cast<long>(k));
        return Polynomial{std::move(d)};
    }

    /// Antiderivative with prescribed constant term.
    [[nodiscard]] Polynomial antiderivative(const T& constant = T(0)) const {
        std::vector<T> a(c_.size() + 1);
        a[0] = constant;
        for (std::size_t k = 0; k < c_.size(); ++k) a[k + 1] = c_[k] / T(static_cast<long>(k + 1));
        return Polynomial{std::move(a)};
    }

    /// Copy with the constant term replaced.
    [[nodiscard]] Polynomial with_constant_term(const T& constant) const {
        std::vector<T> a = c_;
        if (a.empty()) a.resize(1);
        a[0] = constant;
        return Polynomial{std::move(a)};
    }

    Polynomial operator+(const Polynomial& o) const {
        std::vector<T> r(std::max(c_.size(), o.c_.size()), T(0));
        for (std::size_t k = 0; k < c_.size(); ++k) r[k] = r[k] + c_[k];
        for (std::size_t k = 0; k < o.c_.size(); ++k) r[k] = r[k] + o.c_[k];
        return Polynomial{std::move(r)};
    }

    Polynomial operator-(const Polynomial& o) const {
        std::vector<T> r(std::max(c_.size(), o.c_.size()), T(0));
        for (std::size_t k = 0; k < c_.size(); ++k) r[k] = r[k] + c_[k];
        for (std::size_t k = 0; k < o.c_.size(); ++k) r[k] = r[k] - o.c_[k];
        return Polynomial{std::move(r)};
    }

    Polynomial operator*(const Polynomial& o) const {
        if (is_zero() || o.is_zero()) return {};
        std::vector<T> r(c_.size() + o.c_.size() - 1, T(0));
        for (std::size_t i = 0; i < c_.size(); ++i)
            for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] = r[i + j] + c_[i] * o.c_[j];
        return Polynomial{std::move(r)};
    }

    Polynomial operator*(const T& s) const {
        std::vector<T> r = c_;
        for (auto& x : r) x = x * s;
        return Polynomial{std::move(r)};
    }

    bool operator==(const Polynomial& o) const { return c_ == o.c_; }

  private:
    void trim() {
        while (!c_.empty() && c_.back() == T(0)) c_.pop_back();
    }

    std::vector<T> c_;
};

}  // namespace backreaction
