#include "aniso/util.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <thread>

namespace aniso {

static double tree_sum_range(const double* v, std::size_t n) {
    if (n == 0) return 0.0;
    if (n == 1) return v[0];
    if (n == 2) return v[0] + v[1];
    std::size_t half = n / 2;
    return tree_sum_range(v, half) + tree_sum_range(v + half, n - half);
}

double tree_sum(const std::vector<double>& v) { return tree_sum_range(v.data(), v.size()); }

int worker_count() {
    if (const char* env = std::getenv("ANISO_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    int workers = worker_count();
    if (workers <= 1 || n < 64) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    int spawn = std::min<std::size_t>(workers, n) - 1;
    pool.reserve(spawn);
    for (int t = 0; t < spawn; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string fmt_g17(double x) {
    if (std::isnan(x)) return "null";
    if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string json_escape(const std::string& s) {
    std::string o;
    o.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': o += "\\\""; break;
            case '\\': o += "\\\\"; break;
            case '\n': o += "\\n"; break;
            case '\t': o += "\\t"; break;
            case '\r': o += "\\r"; break;
            default: o += c;
        }
    }
    return o;
}

void JsonWriter::comma() {
    if (!first_.empty()) {
        if (!first_.back()) out_ += ',';
        first_.back() = false;
    }
}

void JsonWriter::begin_object() {
    comma();
    out_ += '{';
    first_.push_back(true);
}

void JsonWriter::end_object() {
    out_ += '}';
    first_.pop_back();
}

void JsonWriter::begin_array() {
    comma();
    out_ += '[';
    first_.push_back(true);
}

void JsonWriter::end_array() {
    out_ += ']';
    first_.pop_back();
}

void JsonWriter::key(const std::string& k) {
    comma();
    out_ += '"';
    out_ += json_escape(k);
    out_ += "\":";
    // the value that follows the key must not emit its own comma
    if (!first_.empty()) first_.back() = true;
}

void JsonWriter::value(double x) {
    comma();
    out_ += fmt_g17(x);
}

void JsonWriter::value(int x) {
    comma();
    out_ += std::to_string(x);
}

void JsonWriter::value(std::size_t x) {
    comma();
    out_ += std::to_string(x);
}

void JsonWriter::value(bool b) {
    comma();
    out_ += b ? "true" : "false";
}

void JsonWriter::value(const std::string& s) {
    comma();
    out_ += '"';
    out_ += json_escape(s);
    out_ += '"';
}

void JsonWriter::raw_null() {
    comma();
    out_ += "null";
}

}  // namespace aniso
