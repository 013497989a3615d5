#pragma once

#include <string>
#include <vector>

namespace pemsim {

/// Polynomial in the Laplace variable s, coefficients stored low to high.
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(std::initializer_list<double> coeffs) : c_(coeffs) { trim(); }
    explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }

    static Polynomial constant(double v) { return Polynomial({v}); }
    /// v * s^power
    static Polynomial monomial(double v, int power);

    int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
    bool is_zero() const { return c_.empty(); }
    double coeff(int k) const {
        return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[static_cast<std::size_t>(k)] : 0.0;
    }
    /// Number of trailing zero coefficients (the s^k factor of the polynomial).
    int trailing_zeros() const;

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator*(double k) const;
    Polynomial operator-() const { return *this * -1.0; }

    /// Drops the lowest `count` coefficients (exact division by s^count).
    Polynomial shift_down(int count) const;

    double evaluate(double s) const;
    std::string str() const;  // e.g. "2.5*s^2 - s + 1"

private:
    void trim();
    std::vector<double> c_;
};

/// Rational function num(s)/den(s) with lightweight normalization: common
/// powers of s cancelled and the denominator scaled to unit leading
/// coefficient. Suited to ladder/op-amp nodal analysis where genuine
/// polynomial common factors cancel exactly during elimination.
struct RationalFunction {
    Polynomial num;
    Polynomial den;

    RationalFunction() : num(), den(Polynomial::constant(1.0)) {}
    RationalFunction(Polynomial n, Polynomial d);

    static RationalFunction constant(double v) {
        return RationalFunction(Polynomial::constant(v), Polynomial::constant(1.0));
    }

    RationalFunction operator+(const RationalFunction& o) const;
    RationalFunction operator-(const RationalFunction& o) const;
    RationalFunction operator*(const RationalFunction& o) const;
    RationalFunction operator/(const RationalFunction& o) const;

    bool is_zero() const { return num.is_zero(); }
    double evaluate(double s) const { return num.evaluate(s) / den.evaluate(s); }
    std::string str() const;

private:
    void normalize();
};

}  // namespace pemsim
