#pragma once

#include <map>
#include <string>
#include <vector>

#include "tropfan/rational.hpp"

namespace tropfan {

// Finitely supported rational linear form in named coordinates.
struct LinearForm {
    std::map<std::string, Rat> coeff;  // zero coefficients dropped

    static LinearForm var(const std::string& name) {
        LinearForm f;
        f.coeff[name] = 1;
        return f;
    }

    bool is_zero() const { return coeff.empty(); }
    Rat at(const std::string& name) const {
        auto it = coeff.find(name);
        return it == coeff.end() ? Rat(0) : it->second;
    }

    LinearForm& operator+=(const LinearForm& o);
    LinearForm& operator-=(const LinearForm& o);
    LinearForm& operator*=(const Rat& c);
    friend LinearForm operator+(LinearForm a, const LinearForm& b) { return a += b; }
    friend LinearForm operator-(LinearForm a, const LinearForm& b) { return a -= b; }
    friend LinearForm operator*(LinearForm a, const Rat& c) { return a *= c; }
    friend LinearForm operator*(const Rat& c, LinearForm a) { return a *= c; }
    LinearForm operator-() const;
    bool operator==(const LinearForm& o) const { return coeff == o.coeff; }
    bool operator<(const LinearForm& o) const { return coeff < o.coeff; }

    Rat eval(const std::map<std::string, Rat>& point) const;
    Rat eval_dense(const std::vector<std::string>& coords, const std::vector<Rat>& point) const;
    std::vector<Rat> dense(const std::vector<std::string>& coords) const;

    // Canonical display: integer combination, divided by a common denominator
    // when needed, e.g. "2*l1 - l2" or "(2*l2 - l3)/2"; "0" when zero.
    std::string str() const;
};

LinearForm form_from_dense(const std::vector<std::string>& coords, const std::vector<Rat>& row);

}  // namespace tropfan
