#include "pemsim/sdomain.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pemsim {

void Polynomial::trim() {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

Polynomial Polynomial::monomial(double v, int power) {
    if (power < 0) throw std::invalid_argument("monomial power must be >= 0");
    std::vector<double> c(static_cast<std::size_t>(power) + 1, 0.0);
    c.back() = v;
    return Polynomial(std::move(c));
}

int Polynomial::trailing_zeros() const {
    int k = 0;
    while (k < static_cast<int>(c_.size()) && c_[static_cast<std::size_t>(k)] == 0.0) ++k;
    return k;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
    for (std::size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
    return Polynomial(std::move(r));
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + (o * -1.0); }

Polynomial Polynomial::operator*(const Polynomial& o) const {
    if (is_zero() || o.is_zero()) return Polynomial();
    std::vector<double> r(c_.size() + o.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i) {
        for (std::size_t j = 0; j < o.c_.size(); ++j) {
            r[i + j] += c_[i] * o.c_[j];
        }
    }
    return Polynomial(std::move(r));
}

Polynomial Polynomial::operator*(double k) const {
    std::vector<double> r = c_;
    for (double& v : r) v *= k;
    return Polynomial(std::move(r));
}

Polynomial Polynomial::shift_down(int count) const {
    if (count == 0) return *this;
    if (trailing_zeros() < count) throw std::logic_error("shift_down would drop nonzero terms");
    std::vector<double> r(c_.begin() + count, c_.end());
    return Polynomial(std::move(r));
}

double Polynomial::evaluate(double s) const {
    double acc = 0.0;
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * s + c_[i];
    return acc;
}

std::string Polynomial::str() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int k = degree(); k >= 0; --k) {
        const double v = coeff(k);
        if (v == 0.0) continue;
        if (!first) os << (v < 0 ? " - " : " + ");
        else if (v < 0) os << "-";
        const double mag = std::abs(v);
        if (mag != 1.0 || k == 0) os << mag;
        if (k >= 1) {
            if (mag != 1.0) os << "*";
            os << "s";
            if (k > 1) os << "^" << k;
        }
        first = false;
    }
    return os.str();
}

RationalFunction::RationalFunction(Polynomial n, Polynomial d) : num(std::move(n)), den(std::move(d)) {
    if (den.is_zero()) throw std::domain_error("rational function with zero denominator");
    normalize();
}

void RationalFunction::normalize() {
    if (num.is_zero()) {
        den = Polynomial::constant(1.0);
        return;
    }
    const int common = std::min(num.trailing_zeros(), den.trailing_zeros());
    num = num.shift_down(common);
    den = den.shift_down(common);
    const double lead = den.coeff(den.degree());
    num = num * (1.0 / lead);
    den = den * (1.0 / lead);
}

RationalFunction RationalFunction::operator+(const RationalFunction& o) const {
    return RationalFunction(num * o.den + o.num * den, den * o.den);
}

RationalFunction RationalFunction::operator-(const RationalFunction& o) const {
    return RationalFunction(num * o.den - o.num * den, den * o.den);
}

RationalFunction RationalFunction::operator*(const RationalFunction& o) const {
    return RationalFunction(num * o.num, den * o.den);
}

RationalFunction RationalFunction::operator/(const RationalFunction& o) const {
    if (o.is_zero()) throw std::domain_error("division by zero rational function");
    return RationalFunction(num * o.den, den * o.num);
}

std::string RationalFunction::str() const {
    if (den.degree() == 0 && den.coeff(0) == 1.0) return num.str();
    return "(" + num.str() + ") / (" + den.str() + ")";
}

}  // namespace pemsim
