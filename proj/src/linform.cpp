#include "tropfan/linform.hpp"

#include <sstream>
#include <stdexcept>

namespace tropfan {

LinearForm& LinearForm::operator+=(const LinearForm& o) {
    for (const auto& [name, c] : o.coeff) {
        Rat v = at(name) + c;
        if (v == 0)
            coeff.erase(name);
        else
            coeff[name] = v;
    }
    return *this;
}

LinearForm& LinearForm::operator-=(const LinearForm& o) {
    for (const auto& [name, c] : o.coeff) {
        Rat v = at(name) - c;
        if (v == 0)
            coeff.erase(name);
        else
            coeff[name] = v;
    }
    return *this;
}

LinearForm& LinearForm::operator*=(const Rat& c) {
    if (c == 0) {
        coeff.clear();
        return *this;
    }
    for (auto& [_, v] : coeff) v *= c;
    return *this;
}

LinearForm LinearForm::operator-() const {
    LinearForm f = *this;
    for (auto& [_, v] : f.coeff) v = -v;
    return f;
}

Rat LinearForm::eval(const std::map<std::string, Rat>& point) const {
    Rat sum = 0;
    for (const auto& [name, c] : coeff) {
        auto it = point.find(name);
        if (it == point.end()) throw std::invalid_argument("eval: missing coordinate " + name);
        sum += c * it->second;
    }
    return sum;
}

Rat LinearForm::eval_dense(const std::vector<std::string>& coords, const std::vector<Rat>& point) const {
    Rat sum = 0;
    for (size_t i = 0; i < coords.size(); ++i) {
        auto it = coeff.find(coords[i]);
        if (it != coeff.end()) sum += it->second * point[i];
    }
    return sum;
}

std::vector<Rat> LinearForm::dense(const std::vector<std::string>& coords) const {
    std::vector<Rat> row(coords.size(), Rat(0));
    size_t found = 0;
    for (size_t i = 0; i < coords.size(); ++i) {
        auto it = coeff.find(coords[i]);
        if (it != coeff.end()) {
            row[i] = it->second;
            ++found;
        }
    }
    if (found != coeff.size()) throw std::invalid_argument("dense: form uses a coordinate outside the list");
    return row;
}

std::string LinearForm::str() const {
    if (coeff.empty()) return "0";
    Int den = 1;
    for (const auto& [_, c] : coeff) den = int_lcm(den, c.get_den());
    std::ostringstream os;
    bool first = true;
    for (const auto& [name, c] : coeff) {
        Int n = c.get_num() * (den / c.get_den());
        if (first) {
            if (n < 0) os << "-";
        } else {
            os << (n < 0 ? " - " : " + ");
        }
        Int a = abs(n);
        if (a != 1) os << a.get_str() << "*";
        os << name;
        first = false;
    }
    if (den == 1) return os.str();
    return "(" + os.str() + ")/" + den.get_str();
}

LinearForm form_from_dense(const std::vector<std::string>& coords, const std::vector<Rat>& row) {
    LinearForm f;
    for (size_t i = 0; i < coords.size() && i < row.size(); ++i)
        if (row[i] != 0) f.coeff[coords[i]] = row[i];
    return f;
}

}  // namespace tropfan
