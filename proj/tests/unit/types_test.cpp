#include <gtest/gtest.h>

#include "botscan/error.hpp"
#include "botscan/types.hpp"

namespace botscan {
namespace {

TEST(Timestamp, ParsesCanonicalAndVariants) {
  const auto ts = parse_timestamp("2021-12-01T00:00:00Z");
  ASSERT_TRUE(ts);
  EXPECT_EQ(format_timestamp(*ts), "2021-12-01T00:00:00Z");
  EXPECT_EQ(parse_timestamp("2021-12-01"), ts);
  EXPECT_EQ(parse_timestamp("2021-12-01T00:00:00.123Z"), ts);
  EXPECT_EQ(parse_timestamp("2021-12-01T01:30:00+01:30"), ts);
  EXPECT_EQ(parse_timestamp("2021-11-30T19:00:00-05:00"), ts);
  EXPECT_EQ(ts->time_since_epoch().count(), 1638316800);
}

TEST(Timestamp, RejectsGarbage) {
  for (const char* bad : {"yesterday", "", "2021-13-01", "2021-02-30", "2021-12-01T25:00:00Z",
                          "2021-12-01T00:00:00Q", "2021-12-01T00:00", "2021-12-01T00:00:00Zjunk"}) {
    EXPECT_FALSE(parse_timestamp(bad)) << bad;
  }
  EXPECT_THROW(parse_timestamp_or_throw("yesterday"), Error);
}

TEST(RepoRef, ParsesOwnerSlashName) {
  const auto r = RepoRef::parse("paritytech/substrate");
  EXPECT_EQ(r.owner, "paritytech");
  EXPECT_EQ(r.name, "substrate");
  EXPECT_EQ(r.str(), "paritytech/substrate");
  for (const char* bad : {"diem", "/diem", "diem/", "a/b/c", ""}) {
    EXPECT_THROW(RepoRef::parse(bad), Error) << bad;
  }
}

TEST(FetchWindow, IsHalfOpenAndOrdered) {
  const auto since = *parse_timestamp("2021-12-01T00:00:00Z");
  const auto until = *parse_timestamp("2022-02-01T00:00:00Z");
  const FetchWindow w{since, until};
  EXPECT_TRUE(w.contains(since));
  EXPECT_FALSE(w.contains(until));
  EXPECT_TRUE(w.contains(until - std::chrono::seconds{1}));
  EXPECT_THROW((FetchWindow{until, since}), Error);
  EXPECT_THROW((FetchWindow{since, since}), Error);
}

TEST(ActivityKind, RoundTripsNames) {
  EXPECT_EQ(parse_activity_kind(to_string(ActivityKind::issue)), ActivityKind::issue);
  EXPECT_EQ(parse_activity_kind(to_string(ActivityKind::pull_request)), ActivityKind::pull_request);
  EXPECT_FALSE(parse_activity_kind("pr"));
}

}  // namespace
}  // namespace botscan
