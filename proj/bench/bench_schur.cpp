#include <benchmark/benchmark.h>

#include <random>

#include "aropt/conic/program.hpp"
#include "aropt/conic/schur.hpp"

using namespace aropt::conic;

namespace {

// Rows shaped like coefficient matching on a Gram block: each row touches a
// few entries of an order x order matrix.
PsdRows make_rows(int order, int nrows, int per_row) {
  std::mt19937 rng(42);
  std::uniform_int_distribution<int> pick(0, svec_size(order) - 1);
  std::normal_distribution<double> g;
  PsdRows rows;
  rows.order = order;
  rows.local.resize(nrows);
  for (int r = 0; r < nrows; ++r) {
    rows.rows.push_back(r);
    for (int k = 0; k < per_row; ++k) rows.add_entry(r, pick(rng), g(rng));
  }
  rows.finalize();
  return rows;
}

Eigen::MatrixXd make_R(int order) {
  std::mt19937 rng(7);
  std::normal_distribution<double> g;
  Eigen::MatrixXd B = Eigen::MatrixXd::NullaryExpr(order, order, [&] { return g(rng); });
  return B * B.transpose();
}

void BM_SchurReference(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  const PsdRows rows = make_rows(order, svec_size(order), 4);
  const Eigen::MatrixXd R = make_R(order);
  Eigen::MatrixXd out;
  for (auto _ : state) {
    psd_schur_block_reference(rows, R, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_SchurParallel(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  const PsdRows rows = make_rows(order, svec_size(order), 4);
  const Eigen::MatrixXd R = make_R(order);
  Eigen::MatrixXd out;
  for (auto _ : state) {
    psd_schur_block(rows, R, out);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_SchurReference)->Arg(10)->Arg(22)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SchurParallel)->Arg(10)->Arg(22)->Arg(40)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
