#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace folqa {

constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Deterministic random source. All sampling goes through below()/unit(),
// which depend only on the standardized mt19937_64 output stream, so the
// same seed yields the same draws on every platform.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : seed_(seed), eng_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next() { return eng_(); }

    // Unbiased integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = n == 0 ? 0 : ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % n;
    }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(below(n)); }

    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool chance(double p) { return unit() < p; }

    template <typename T>
    const T& pick(const std::vector<T>& items) {
        return items[index(items.size())];
    }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[index(i)]);
        }
    }

    // Child seeds derive from the original seed, not the stream position,
    // so per-example generators are independent of draw order.
    SeededRng derive(std::string_view tag) const {
        return SeededRng(splitmix64(seed_ ^ fnv1a64(tag)));
    }
    SeededRng derive(std::uint64_t n) const {
        return SeededRng(splitmix64(seed_ ^ splitmix64(n + 1)));
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 eng_;
};

}  // namespace folqa
