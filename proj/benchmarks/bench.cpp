#include <benchmark/benchmark.h>

#include "confine/enclave/envelope.hpp"
#include "confine/harness/scenario.hpp"
#include "confine/harness/split.hpp"
#include "confine/log_codec.hpp"
#include "confine/mining/dfg.hpp"
#include "confine/segmenter.hpp"

namespace {

using namespace confine;

harness::Scenario scenario(std::size_t cases) { return harness::generate_scenario_log({cases, 1}); }

void BM_MergePartitions(benchmark::State& state) {
  const auto sc = scenario(static_cast<std::size_t>(state.range(0)));
  std::vector<EventLog> parts;
  for (const auto& [org, p] : harness::split_log(sc.log, sc.org_map)) parts.push_back(p);
  for (auto _ : state) benchmark::DoNotOptimize(merge_all(parts));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(sc.log.size()));
}
BENCHMARK(BM_MergePartitions)->Arg(100)->Arg(1000)->Arg(10000);

void BM_Segment(benchmark::State& state) {
  const auto sc = scenario(1000);
  const auto parts = harness::split_log(sc.log, sc.org_map);
  const auto& hospital = parts.at("hospital");
  const auto iids = iid_set(hospital);
  for (auto _ : state) benchmark::DoNotOptimize(segment_event_log(hospital, iids, state.range(0)));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(wire::size_of(hospital)));
}
BENCHMARK(BM_Segment)->Arg(50'000)->Arg(100'000)->Arg(1'000'000);

void BM_HeuristicsObserve(benchmark::State& state) {
  const auto cases = split_by_case(scenario(1000).log);
  for (auto _ : state) {
    mining::DfgState dfg;
    for (const auto& [iid, c] : cases) mining::hm_observe(dfg, c);
    benchmark::DoNotOptimize(dfg);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cases.size()));
}
BENCHMARK(BM_HeuristicsObserve);

void BM_SealOpen(benchmark::State& state) {
  const Bytes payload(static_cast<std::size_t>(state.range(0)), 0x42);
  const auto keys = enclave::SessionKeys::generate();
  const auto prov = enclave::Signer::from_label("hospital");
  for (auto _ : state) {
    const auto env = enclave::seal_segment(payload, enclave::generate_k_sym(), keys.k_pub(), prov);
    benchmark::DoNotOptimize(enclave::open_segment(env, keys, prov.public_key()));
  }
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SealOpen)->Arg(1 << 10)->Arg(100'000)->Arg(1'000'000);

}  // namespace

BENCHMARK_MAIN();
