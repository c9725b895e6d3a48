#ifndef ANISO_UTIL_HPP
#define ANISO_UTIL_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace aniso {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Point / direction in dimension 2 or 3; unused components stay 0.
using Vec = std::array<double, 3>;

inline Vec vec2(double x, double y) { return {x, y, 0.0}; }
inline Vec vec3(double x, double y, double z) { return {x, y, z}; }

inline double dot(const Vec& a, const Vec& b, int dim) {
    double s = a[0] * b[0] + a[1] * b[1];
    if (dim > 2) s += a[2] * b[2];
    return s;
}

inline double norm2(const Vec& a, int dim) { return std::sqrt(dot(a, a, dim)); }

inline Vec axpy(double t, const Vec& a, const Vec& b) {
    return {t * a[0] + b[0], t * a[1] + b[1], t * a[2] + b[2]};
}

inline Vec scale(double t, const Vec& a) { return {t * a[0], t * a[1], t * a[2]}; }

inline Vec sub(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec add(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }

// Error with a single-line machine-parseable code.
struct Error : std::runtime_error {
    std::string code;
    Error(std::string c, const std::string& msg)
        : std::runtime_error(c + ": " + msg), code(std::move(c)) {}
};

// Deterministic pairwise-tree sum: result depends only on the value sequence,
// never on thread count or accumulation chunking elsewhere.
double tree_sum(const std::vector<double>& v);

// Runs fn(i) for i in [0, n) on up to worker_count() threads. Each index is
// processed exactly once; writes must go to disjoint slots.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Worker cap: ANISO_THREADS if set, else hardware concurrency (min 1).
int worker_count();

// FNV-1a 64-bit over raw bytes, hex string; used to fingerprint run inputs.
std::string fnv1a_hex(const std::string& bytes);

// Fixed 17-significant-digit formatting for every serialized number.
std::string fmt_g17(double x);

// Small ordered JSON writer (objects keep insertion order; numbers via
// fmt_g17) so that identical runs serialize byte-identically.
class JsonWriter {
public:
    void begin_object();
    void end_object();
    void begin_array();
    void end_array();
    void key(const std::string& k);
    void value(double x);
    void value(int x);
    void value(std::size_t x);
    void value(bool b);
    void value(const std::string& s);
    void raw_null();
    std::string str() const { return out_; }

private:
    void comma();
    std::string out_;
    std::vector<bool> first_;  // per open scope
};

std::string json_escape(const std::string& s);

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double a, double b) {
    std::uniform_real_distribution<double> d(a, b);
    return d(rng);
}

}  // namespace aniso

#endif
