#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace grag {

/// Base error type for the library. `kind` survives the C API boundary as a
/// status code.
class Error : public std::runtime_error {
public:
    enum class Kind {
        invalid_argument,
        io,
        parse,
        validation,
        backend,
        not_found,
        internal,
    };

    Error(Kind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

namespace util {

/// Hex-encoded SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// FNV-1a 64-bit hash. Stable across platforms; used only for seed derivation
/// and synthetic-fixture dispersion, never for addressing.
std::uint64_t fnv1a64(std::string_view data);

/// Mixes a base seed with string parts into a new 64-bit seed. Same inputs
/// give the same seed on every platform.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::string_view> parts);

/// Deterministic RNG. Wraps mt19937_64 but avoids std::uniform_* and
/// std::shuffle, whose outputs are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    /// Uniform draw in [0, n). n must be > 0.
    std::size_t bounded(std::size_t n);

    double unit();  // [0, 1)

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = bounded(i);
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 eng_;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Write-temp-then-rename so readers never observe a partial file.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

std::vector<std::string> read_lines(const std::filesystem::path& path);

/// Runs fn(0..n-1) on up to `parallelism` worker threads. Exceptions from
/// workers are rethrown on the calling thread (first one wins).
void parallel_for(std::size_t n, std::size_t parallelism, const std::function<void(std::size_t)>& fn);

/// Fixed two-decimal formatting ("65.00"); avoids std::format (gcc 11).
std::string format_fixed2(double value);

}  // namespace util
}  // namespace grag
