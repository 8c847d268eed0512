// Recommends items close to a reference bit string and shows where the
// probability mass ended up.

#include <qamp/qamp.hpp>

#include <cstdio>

int main() {
    using namespace qamp;
    const unsigned n = 10;
    const SimilaritySpec spec(n, 0b1011001110);
    const auto params = calibrate_beta(n, 4.0);
    Rng rng(2024);

    const auto result = recommend(spec, 5, params, rng);
    std::printf("beta %.4f, %zu rounds, %zu draws\n", params.beta(), result.rounds_used, result.draws);
    for (const auto& item : result.items) std::printf("  item %4llu  similarity %u\n",
                                                      static_cast<unsigned long long>(item.index), item.similarity);

    std::printf("mass by similarity:\n");
    for (unsigned s = 0; s <= n; ++s) std::printf("  S=%2u  %.4f\n", s, result.per_similarity_sampling[s]);
}
