#include <gtest/gtest.h>

#include "confine/error.hpp"
#include "confine/model.hpp"
#include "confine/timestamp.hpp"
#include "support/fixtures.hpp"

namespace confine {
namespace {

using testing::ids_of;
using testing::make_event;
using testing::motivating_partitions;
using testing::RandomLogGen;
using testing::sorted_union;

template <typename F>
Errc code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no confine::Error thrown";
  return Errc::kInvalidConfig;
}

TEST(Timestamp, ParsesMinutePrecision) {
  EXPECT_EQ(parse_timestamp("1970-01-01T00:01"), 60'000);
  EXPECT_EQ(parse_timestamp("2022-07-14T10:36"), parse_timestamp("2022-07-14T10:36:00.000Z"));
}

TEST(Timestamp, AppliesOffsets) {
  EXPECT_EQ(parse_timestamp("2022-07-14 12:36:00+02:00"), parse_timestamp("2022-07-14T10:36:00Z"));
  EXPECT_EQ(parse_timestamp("2022-07-14T08:36:00-02:00"), parse_timestamp("2022-07-14T10:36:00Z"));
}

TEST(Timestamp, FractionAndEpochForms) {
  EXPECT_EQ(parse_timestamp("1970-01-01T00:00:01.250"), 1250);
  EXPECT_EQ(parse_timestamp("123456"), 123456);
}

TEST(Timestamp, FormatRoundTrips) {
  for (Timestamp ts : {Timestamp{0}, Timestamp{1657795000123}, Timestamp{951782400000}}) {
    EXPECT_EQ(parse_timestamp(format_timestamp(ts)), ts);
  }
  EXPECT_EQ(format_timestamp(parse_timestamp("2022-07-14T10:36")), "2022-07-14T10:36:00.000Z");
}

TEST(Timestamp, RejectsGarbage) {
  for (const char* bad : {"", "yesterday", "2022-13-01T00:00", "2022-07-14T25:00", "2022-07-14T10:36:00+2"}) {
    EXPECT_EQ(code_of([&] { parse_timestamp(bad); }), Errc::kUnparsableTimestamp) << bad;
  }
}

TEST(CanonicalOrder, MotivatingEventsCompareByTimestamp) {
  const auto parts = motivating_partitions();
  const auto& h = parts.at("hospital");
  const auto& p = parts.at("pharma");
  const auto e4 = *std::find_if(h.begin(), h.end(), [](const Event& e) { return e.event_id == "e4"; });
  const auto e20 = *std::find_if(p.begin(), p.end(), [](const Event& e) { return e.event_id == "e20"; });
  EXPECT_TRUE(canonical_compare(e4, e20) < 0);
  EXPECT_TRUE(canonical_compare(e20, e4) > 0);
}

TEST(CanonicalOrder, Reflexive) {
  const auto e = make_event("x", "1", "A", "2022-07-14T10:36");
  EXPECT_TRUE(canonical_compare(e, e) == 0);
}

TEST(CanonicalOrder, TiesBreakOnProvisionerThenId) {
  const auto a = make_event("z", "1", "A", "2022-07-14T10:36", "A");
  const auto b = make_event("a", "1", "A", "2022-07-14T10:36", "B");
  EXPECT_TRUE(canonical_compare(a, b) < 0);
  const auto c = make_event("a", "1", "A", "2022-07-14T10:36", "A");
  EXPECT_TRUE(canonical_compare(c, a) < 0);
}

TEST(EventLog, FromEventsSortsAndValidates) {
  auto log = EventLog::from_events({make_event("b", "1", "B", "2022-07-14T11:00"),
                                    make_event("a", "1", "A", "2022-07-14T10:00")});
  EXPECT_EQ(ids_of(log), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(code_of([] {
              EventLog::from_events({make_event("a", "1", "A", "2022-07-14T10:00"),
                                     make_event("a", "2", "B", "2022-07-14T11:00")});
            }),
            Errc::kDuplicateEvent);
  EXPECT_EQ(code_of([] { EventLog::from_events({make_event("a", "", "A", "2022-07-14T10:00")}); }),
            Errc::kInvalidEvent);
  EXPECT_EQ(code_of([] { EventLog::from_events({make_event("a", "1", "", "2022-07-14T10:00")}); }),
            Errc::kInvalidEvent);
  EXPECT_EQ(code_of([] { EventLog::from_events({make_event("", "1", "A", "2022-07-14T10:00")}); }),
            Errc::kInvalidEvent);
}

TEST(EventLog, FromSortedRejectsDisorder) {
  EXPECT_EQ(code_of([] {
              EventLog::from_sorted({make_event("b", "1", "B", "2022-07-14T11:00"),
                                     make_event("a", "1", "A", "2022-07-14T10:00")});
            }),
            Errc::kUnsortedLog);
}

TEST(Merge, MotivatingCase312StartsWithTheHospitalAndPharmaPrefix) {
  const auto parts = motivating_partitions();
  const auto merged = merge(extract_case(parts.at("hospital"), "312"), extract_case(parts.at("pharma"), "312"));
  ASSERT_EQ(merged.size(), 13u);
  const auto trace = trace_of(merged);
  const std::vector<std::string> prefix{"PH", "COPA", "OD", "DOR", "PDL", "SD", "RD"};
  EXPECT_TRUE(std::equal(prefix.begin(), prefix.end(), trace.begin()));
}

TEST(Merge, FullMotivatingCase312MatchesItsTrace) {
  const auto parts = motivating_partitions();
  std::vector<EventLog> cases;
  for (const auto& [org, p] : parts) cases.push_back(extract_case(p, "312"));
  const std::vector<std::string> t312{"PH", "COPA", "OD", "DOR", "PDL", "SD", "RD", "AD", "TP",
                                      "PAFH", "PIA", "PT", "VRT", "TPB", "RPB", "DPH", "PCD", "DP"};
  EXPECT_EQ(trace_of(merge_all(cases)), t312);
  std::vector<EventLog> c711;
  for (const auto& [org, p] : parts) c711.push_back(extract_case(p, "711"));
  const std::vector<std::string> t711{"PH", "COPA", "OD", "DOR", "PDL", "SD", "RD", "AD", "PRTA", "PCD", "DPH", "DP"};
  EXPECT_EQ(trace_of(merge_all(c711)), t711);
}

TEST(Merge, EmptyLogIsIdentity) {
  RandomLogGen gen(7);
  const auto l = gen.log("p", 25);
  EXPECT_EQ(merge(l, EventLog{}), l);
  EXPECT_EQ(merge(EventLog{}, l), l);
}

TEST(Merge, AssociativeOnRandomLogsAgainstSortedUnion) {
  RandomLogGen gen(11);
  for (int round = 0; round < 50; ++round) {
    const auto a = gen.log("A", 10), b = gen.log("B", 10), c = gen.log("C", 10);
    const auto left = merge(merge(a, b), c);
    EXPECT_EQ(left, merge(a, merge(b, c)));
    EXPECT_EQ(left.events(), sorted_union({a, b, c}));
  }
}

TEST(Merge, RejectsSharedEventIds) {
  const auto a = EventLog::from_events({make_event("x", "1", "A", "2022-07-14T10:00", "A")});
  const auto b = EventLog::from_events({make_event("x", "1", "A", "2022-07-14T10:00", "B")});
  EXPECT_EQ(code_of([&] { merge(a, b); }), Errc::kDuplicateEvent);
}

TEST(Merge, MergeAllEqualsLeftFold) {
  RandomLogGen gen(13);
  std::vector<EventLog> logs;
  EventLog fold;
  for (int i = 0; i < 6; ++i) {
    logs.push_back(gen.log("p" + std::to_string(i), gen.uniform(0, 15)));
    fold = merge(fold, logs.back());
  }
  EXPECT_EQ(merge_all(logs), fold);
  EXPECT_TRUE(merge_all({}).empty());
}

TEST(Cases, ExtractHospitalCase312) {
  const auto h = motivating_partitions().at("hospital");
  EXPECT_EQ(ids_of(extract_case(h, "312")),
            (std::vector<std::string>{"e1", "e2", "e4", "e8", "e10", "e11", "e16", "e17", "e18", "e19"}));
}

TEST(Cases, UnknownIidGivesEmptyCase) {
  EXPECT_TRUE(extract_case(motivating_partitions().at("hospital"), "999").empty());
  EXPECT_TRUE(extract_case(EventLog{}, "1").empty());
}

TEST(Cases, IidSetOfMotivatingPartitions) {
  const auto parts = motivating_partitions();
  EXPECT_EQ(iid_set(parts.at("hospital")), (std::set<CaseId>{"312", "711"}));
  EXPECT_EQ(iid_set(parts.at("clinic")), (std::set<CaseId>{"312"}));
  EXPECT_TRUE(iid_set(EventLog{}).empty());
}

TEST(Cases, RandomLogPartitionsByIid) {
  RandomLogGen gen(17);
  for (int round = 0; round < 30; ++round) {
    const auto log = gen.log("p", gen.uniform(0, 60), 12);
    std::set<CaseId> naive;
    for (const auto& e : log) naive.insert(e.iid);
    EXPECT_EQ(iid_set(log), naive);

    const auto by_case = split_by_case(log);
    std::vector<EventLog> pieces;
    for (const auto& iid : naive) {
      EXPECT_EQ(by_case.at(iid), extract_case(log, iid));
      pieces.push_back(extract_case(log, iid));
    }
    EXPECT_EQ(merge_all(pieces), log);
  }
}

}  // namespace
}  // namespace confine
