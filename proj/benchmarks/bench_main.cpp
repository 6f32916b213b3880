#include "magspec/degennes.hpp"
#include "magspec/diagnostics.hpp"
#include "magspec/eigensolver.hpp"
#include "magspec/magop.hpp"

#include <benchmark/benchmark.h>

#include <memory>

using namespace magspec;

namespace {

std::shared_ptr<const Grid> disk_grid(double h) {
    static const auto disk = Domain::disk(Vec3::Zero(), 1.0);
    return std::make_shared<const Grid>(Grid::build(disk, h));
}

void BM_HalfLineEigenvalue(benchmark::State& state) {
    const degennes::HalfLineDiscretization disc{20.0, 1.0 / static_cast<double>(state.range(0))};
    for (auto _ : state) benchmark::DoNotOptimize(degennes::mu_of_xi(-0.768, disc).mu);
}
BENCHMARK(BM_HalfLineEigenvalue)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_Assemble(benchmark::State& state) {
    const auto disk = Domain::disk(Vec3::Zero(), 1.0);
    const auto g = disk_grid(1.0 / static_cast<double>(state.range(0)));
    const auto A = linear_potential(Vec3::UnitZ());
    for (auto _ : state) benchmark::DoNotOptimize(assemble(disk, *A, 20.0, BoundaryCondition::Neumann, g).size());
    state.counters["nodes"] = static_cast<double>(g->size());
}
BENCHMARK(BM_Assemble)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Apply(benchmark::State& state) {
    const auto disk = Domain::disk(Vec3::Zero(), 1.0);
    const auto g = disk_grid(1.0 / static_cast<double>(state.range(0)));
    const auto op = assemble(disk, *linear_potential(Vec3::UnitZ()), 20.0, BoundaryCondition::Neumann, g);
    const CVector u = CVector::Ones(static_cast<Eigen::Index>(op.size()));
    for (auto _ : state) benchmark::DoNotOptimize(op.apply(u).data());
    state.SetItemsProcessed(state.iterations() * static_cast<long>(op.size()));
}
BENCHMARK(BM_Apply)->Arg(50)->Arg(100)->Arg(200);

void BM_LowestEigenpair(benchmark::State& state) {
    set_warning_sink([](const std::string&) {});
    const auto disk = Domain::disk(Vec3::Zero(), 1.0);
    const auto g = disk_grid(1.0 / static_cast<double>(state.range(0)));
    const auto op = assemble(disk, *linear_potential(Vec3::UnitZ()), 20.0, BoundaryCondition::Neumann, g);
    EigenOptions o;
    o.preconditioner = state.range(1) ? Preconditioner::ShiftedFactorization : Preconditioner::Jacobi;
    o.max_iter = 10000;
    for (auto _ : state) benchmark::DoNotOptimize(lowest_eigenpair(op, o).lambda);
}
BENCHMARK(BM_LowestEigenpair)->Args({25, 0})->Args({25, 1})->Args({50, 1})->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
