#include <liecrb/bound.hpp>
#include <liecrb/fisher.hpp>
#include <liecrb/harness.hpp>
#include <liecrb/lie_group.hpp>

#include <benchmark/benchmark.h>

#include <vector>

using namespace liecrb;

namespace {

std::vector<Eigen::Vector3d> axes() {
  return {Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(), Eigen::Vector3d::UnitZ()};
}

GroupDescriptor group_for(int id) {
  switch (id) {
    case 0: return GroupDescriptor::so3();
    case 1: return GroupDescriptor::se3();
    default: return GroupDescriptor::se2();
  }
}

}  // namespace

static void BM_ExpLog(benchmark::State& state) {
  const GroupDescriptor g = group_for(static_cast<int>(state.range(0)));
  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(g.dim(), 0.1, 0.7);
  const AlgebraVector x(g, v);
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_map(exp_map(x)));
  }
  state.SetLabel(g.name());
}
BENCHMARK(BM_ExpLog)->DenseRange(0, 2);

static void BM_FisherMatrixWahba(benchmark::State& state) {
  const WahbaVectors model(axes(), 0.1);
  const GroupElement id = GroupElement::identity(GroupDescriptor::so3());
  for (auto _ : state) {
    benchmark::DoNotOptimize(fisher_matrix(model, id, static_cast<std::size_t>(state.range(0)), 42));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FisherMatrixWahba)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_BoundFixedPoint(benchmark::State& state) {
  const GroupDescriptor g = group_for(static_cast<int>(state.range(0)));
  const StructureTensor& t = StructureTensor::of(g);
  const Eigen::MatrixXd j = 200.0 * Eigen::MatrixXd::Identity(g.dim(), g.dim());
  for (auto _ : state) {
    benchmark::DoNotOptimize(bound_fixed_point(j, t));
  }
  state.SetLabel(g.name());
}
BENCHMARK(BM_BoundFixedPoint)->DenseRange(0, 2);

static void BM_WahbaEstimator(benchmark::State& state) {
  const WahbaVectors model(axes(), 0.1);
  const GroupElement truth = GroupElement::identity(GroupDescriptor::so3());
  Rng rng = make_stream(1, 0);
  const Observation x = model.sample(truth, rng);
  const std::vector<Eigen::Vector3d> obs{x.col(0), x.col(1), x.col(2)};
  const std::vector<Eigen::Vector3d> dirs = axes();
  for (auto _ : state) {
    benchmark::DoNotOptimize(wahba_ml_estimator(obs, dirs));
  }
}
BENCHMARK(BM_WahbaEstimator);

static void BM_RunExperiment(benchmark::State& state) {
  ExperimentConfig c;
  c.model = WahbaModelSpec{axes(), 0.1};
  c.n_trials = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_experiment(c));
  }
}
BENCHMARK(BM_RunExperiment)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
