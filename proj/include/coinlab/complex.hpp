#pragma once

#include "coinlab/numeric.hpp"

#include <ostream>

namespace coinlab {

/// Complex number over a real field F.
template <class F>
struct Complex {
    F re{};
    F im{};

    Complex() = default;
    Complex(F r) : re(std::move(r)), im(0) {}  // NOLINT(google-explicit-constructor)
    Complex(F r, F i) : re(std::move(r)), im(std::move(i)) {}
    Complex(int r) : re(r), im(0) {}  // NOLINT(google-explicit-constructor)

    bool is_zero() const { return re == 0 && im == 0; }

    Complex& operator+=(const Complex& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    Complex& operator-=(const Complex& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    Complex& operator*=(const Complex& o) {
        F r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = std::move(r);
        return *this;
    }
    Complex& operator*=(const F& s) {
        re *= s;
        im *= s;
        return *this;
    }
    Complex& operator/=(const Complex& o) {
        F d = o.re * o.re + o.im * o.im;
        F r = (re * o.re + im * o.im) / d;
        im = (im * o.re - re * o.im) / d;
        re = std::move(r);
        return *this;
    }

    friend Complex operator+(Complex a, const Complex& b) { return a += b; }
    friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
    friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
    friend Complex operator*(Complex a, const F& s) { return a *= s; }
    friend Complex operator*(const F& s, Complex a) { return a *= s; }
    friend Complex operator/(Complex a, const Complex& b) { return a /= b; }
    friend Complex operator-(const Complex& a) { return Complex(-a.re, -a.im); }
    friend bool operator==(const Complex& a, const Complex& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const Complex& a, const Complex& b) { return !(a == b); }
};

template <class F>
Complex<F> conj(const Complex<F>& z) {
    return Complex<F>(z.re, -z.im);
}

/// |z|^2, exact in exact fields.
template <class F>
F norm2(const Complex<F>& z) {
    return z.re * z.re + z.im * z.im;
}

inline Real abs(const Complex<Real>& z) { return sqrt_real(norm2(z)); }

template <class F>
Complex<F> convert_complex(const Complex<Rational>& z) {
    return Complex<F>(from_rational<F>(z.re), from_rational<F>(z.im));
}

template <class F>
std::ostream& operator<<(std::ostream& os, const Complex<F>& z) {
    return os << '(' << z.re << ',' << z.im << ')';
}

}  // namespace coinlab
