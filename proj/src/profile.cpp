#include "aniso/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace aniso {

double eval(const Profile& p, double t) {
    const auto& x = p.x;
    const auto& y = p.y;
    if (x.empty()) throw Error("argument", "empty profile");
    if (t < x.front()) return y.front();
    if (t > x.back()) return y.back();
    // first index with x[i] >= t
    std::size_t i = std::lower_bound(x.begin(), x.end(), t) - x.begin();
    if (x[i] == t) {
        if (p.dup_take_last)
            while (i + 1 < x.size() && x[i + 1] == t) ++i;
        return y[i];
    }
    // interpolate in (x[i-1], x[i])
    double w = (t - x[i - 1]) / (x[i] - x[i - 1]);
    return y[i - 1] + w * (y[i] - y[i - 1]);
}

bool is_monotone(const Profile& p) {
    for (std::size_t i = 1; i < p.x.size(); ++i) {
        if (p.x[i] < p.x[i - 1]) return false;
        if (p.nonincreasing && p.y[i] > p.y[i - 1] + 1e-12) return false;
        if (!p.nonincreasing && p.y[i] < p.y[i - 1] - 1e-12) return false;
    }
    return true;
}

Profile generalized_inverse(const Profile& p, bool sup_flavor) {
    if (p.x.empty()) throw Error("argument", "empty profile");
    Profile inv;
    inv.nonincreasing = p.nonincreasing;
    inv.dup_take_last = p.nonincreasing ? !sup_flavor : sup_flavor;
    const std::size_t n = p.x.size();
    inv.x.reserve(n);
    inv.y.reserve(n);
    auto push = [&](double a, double b) {
        if (!inv.x.empty() && inv.x.back() == a && inv.y.back() == b) return;
        inv.x.push_back(a);
        inv.y.push_back(b);
    };
    if (p.nonincreasing) {
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t i = n - 1 - k;
            push(p.y[i], p.x[i]);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) push(p.y[i], p.x[i]);
    }
    return inv;
}

void write_profile_csv(const std::string& path, const Profile& p) {
    std::ofstream out(path);
    if (!out) throw Error("io", "cannot write " + path);
    out << "# profile: " << (p.nonincreasing ? "nonincreasing" : "nondecreasing") << " "
        << (p.dup_take_last ? "take-last" : "take-first") << "\n";
    for (std::size_t i = 0; i < p.x.size(); ++i)
        out << fmt_g17(p.x[i]) << ',' << fmt_g17(p.y[i]) << "\n";
}

Profile read_profile_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("io", "cannot read " + path);
    Profile p;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("# profile:", 0) == 0) {
            p.nonincreasing = line.find("nonincreasing") != std::string::npos;
            p.dup_take_last = line.find("take-last") != std::string::npos;
            continue;
        }
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        double a, b;
        char comma;
        if (ss >> a >> comma >> b) {
            p.x.push_back(a);
            p.y.push_back(b);
        }
    }
    if (p.x.empty()) throw Error("io", "empty profile file " + path);
    return p;
}

}  // namespace aniso
