#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>

#include <unistd.h>

#include <gtest/gtest.h>

#include "lgfb/error.hpp"
#include "lgfb/model.hpp"
#include "lgfb/solver.hpp"

namespace lgfb::test {

inline constexpr double kPi = 3.14159265358979323846;

inline ModelParams params(double beta = 1.0, double h0 = 1.0) {
    ModelParams p;
    p.a = 1.0;
    p.b = 0.5;
    p.d = 1.0;
    p.mu = 1.0;
    p.beta = beta;
    p.h0 = h0;
    return p;
}

/// Cheap setup for tests that only need qualitative behavior.
inline Discretization coarse(double t_end = 10.0) {
    Discretization d;
    d.L = 20.0;
    d.ny = 60;
    d.dt = 0.02;
    d.t_end = t_end;
    d.record_every = 0.5;
    return d;
}

/// Error code thrown by `fn`, or nullopt when it returns normally.
inline std::optional<ErrorCode> code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return std::nullopt;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("lgfb_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const std::filesystem::path& path() const { return path_; }
    [[nodiscard]] std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace lgfb::test
