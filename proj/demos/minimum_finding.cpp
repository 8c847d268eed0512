// Threshold-descent minimum finding next to the single-shot dynamic heuristic
// on the same random table.

#include <qamp/qamp.hpp>

#include <cstdio>

int main() {
    using namespace qamp;
    const unsigned n = 10;
    Rng values_rng(7);
    std::vector<double> values(dimension(n));
    for (double& v : values) v = values_rng.uniform();
    const ObjectiveTable table(n, std::move(values), Sense::minimize);
    std::printf("true minimum at %llu (%.6f)\n", static_cast<unsigned long long>(table.best_index()),
                table[table.best_index()]);

    Rng rng(1);
    const auto exact = durr_hoyer(table, rng);
    std::printf("durr-hoyer: index %llu value %.6f, %llu Grover iterations over %zu searches\n",
                static_cast<unsigned long long>(exact.best_index), exact.best_value,
                static_cast<unsigned long long>(exact.grover_iterations_total), exact.outer_rounds);

    try {
        const auto fast = dynamic_optimize(table, rng);
        std::printf("dynamic:    index %llu value %.6f, %llu Grover iterations, %.2f%% of entries better\n",
                    static_cast<unsigned long long>(fast.best_index), fast.best_value,
                    static_cast<unsigned long long>(fast.grover_iterations_total),
                    100.0 * table.better_fraction(fast.best_index));
    } catch (const OptimizationValidityError& e) {
        std::printf("dynamic run left the productive regime: %s\n", e.what());
    }
}
