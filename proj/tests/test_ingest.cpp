#include <gtest/gtest.h>

#include "support.hpp"

using namespace newsdesk;
using namespace newsdesk::ingest;
using testing_support::data_dir;
using testing_support::read_file;

namespace {

Source make_source(std::string id, bool enabled = true, bool permitted = true) {
  return Source{id, "Name " + id, "https://" + id + ".example/feed.xml", "https://" + id + ".example/",
                "en", permitted, "", enabled};
}

nlohmann::json source_json() {
  return {{"id", "s1"},
          {"name", "Source One"},
          {"feed_url", "https://one.example/rss"},
          {"homepage_url", "https://one.example/"},
          {"language", "en"},
          {"republish_permitted", true},
          {"license_note", "written agreement 2024"},
          {"enabled", true}};
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::Io;
}

}  // namespace

// ---- url / time ----

TEST(Url, AbsoluteUrls) {
  EXPECT_TRUE(is_absolute_url("https://example.org/a?b=1"));
  EXPECT_TRUE(is_absolute_url("file:///tmp/feed.xml"));
  EXPECT_FALSE(is_absolute_url("/relative/path"));
  EXPECT_FALSE(is_absolute_url("https://"));
  EXPECT_FALSE(is_absolute_url("example.org/feed"));
  const auto p = parse_url("http://127.0.0.1:8080/v1/x");
  ASSERT_TRUE(p);
  EXPECT_EQ(p->scheme, "http");
  EXPECT_EQ(p->authority, "127.0.0.1:8080");
  EXPECT_EQ(p->path, "/v1/x");
}

TEST(Time, ParsesFeedDateFormats) {
  const auto a = parse_rfc822("Mon, 04 Mar 2024 09:30:00 GMT");
  const auto b = parse_iso8601("2024-03-04T09:30:00Z");
  const auto c = parse_iso8601("2024-03-04T04:30:00-05:00");
  ASSERT_TRUE(a && b && c);
  EXPECT_EQ(*a, *b);
  EXPECT_EQ(*b, *c);
  EXPECT_EQ(format_iso8601(*a), "2024-03-04T09:30:00.000Z");
  EXPECT_EQ(parse_iso8601(format_iso8601(*c)), c);
  EXPECT_FALSE(parse_timestamp("next tuesday"));
}

// ---- source registry and gate ----

TEST(Source, StrictJsonRoundTrip) {
  const auto s = source_from_json(source_json());
  EXPECT_EQ(s.id, "s1");
  EXPECT_TRUE(s.republish_permitted);
  EXPECT_EQ(to_json(s), source_json());
}

TEST(Source, RejectsUnknownFieldsAndTypos) {
  auto j = source_json();
  j.erase("republish_permitted");
  j["republish_permited"] = true;
  EXPECT_EQ(code_of([&] { source_from_json(j); }), ErrorCode::InvalidSource);
}

TEST(Source, RejectsMissingFieldsAndRelativeUrls) {
  auto missing = source_json();
  missing.erase("license_note");
  EXPECT_EQ(code_of([&] { source_from_json(missing); }), ErrorCode::InvalidSource);
  auto relative = source_json();
  relative["feed_url"] = "/rss";
  EXPECT_EQ(code_of([&] { source_from_json(relative); }), ErrorCode::InvalidSource);
  auto wrong_type = source_json();
  wrong_type["enabled"] = "yes";
  EXPECT_EQ(code_of([&] { source_from_json(wrong_type); }), ErrorCode::InvalidSource);
}

TEST(Source, RegistryRejectsDuplicateIds) {
  SourceRegistry reg;
  reg.add(make_source("a"));
  EXPECT_EQ(code_of([&] { reg.add(make_source("a")); }), ErrorCode::InvalidSource);
  EXPECT_EQ(reg.size(), 1u);
}

TEST(Gate, Examples) {
  EXPECT_TRUE(allowed(gatekeep(make_source("a", true, true))));
  const auto no_permission = gatekeep(make_source("a", true, false));
  ASSERT_FALSE(allowed(no_permission));
  EXPECT_EQ(std::get<Deny>(no_permission).reason, DenyReason::NoRepublishPermission);
  const auto disabled = gatekeep(make_source("a", false, true));
  ASSERT_FALSE(allowed(disabled));
  EXPECT_EQ(std::get<Deny>(disabled).reason, DenyReason::Disabled);
  EXPECT_EQ(to_string(DenyReason::Disabled), "disabled");
  EXPECT_EQ(to_string(DenyReason::NoRepublishPermission), "no_republish_permission");
}

TEST(Gate, IsConjunctionOverAllFlagCombinations) {
  for (bool enabled : {false, true})
    for (bool permitted : {false, true})
      EXPECT_EQ(allowed(gatekeep(make_source("x", enabled, permitted))), enabled && permitted);
}

TEST(Gate, UnknownSource) {
  SourceRegistry reg({make_source("a")});
  EXPECT_EQ(code_of([&] { reg.gatekeep("missing"); }), ErrorCode::UnknownSource);
}

TEST(Source, PatchAndSaveLoad) {
  testing_support::TempDir dir;
  SourceRegistry reg({make_source("a"), make_source("b")});
  reg.patch("b", SourcePatch{false, std::nullopt, std::string("paused")});
  reg.save(dir / "sources.json");
  const auto loaded = SourceRegistry::load(dir / "sources.json");
  EXPECT_EQ(loaded.to_json(), reg.to_json());
  EXPECT_FALSE(loaded.get("b").enabled);
  EXPECT_EQ(loaded.get("b").license_note, "paused");
  EXPECT_TRUE(loaded.get("b").republish_permitted);
  EXPECT_EQ(code_of([&] { reg.patch("zzz", {}); }), ErrorCode::UnknownSource);
}

// ---- feeds ----

TEST(Feed, ThreeItemRss) {
  const auto parsed = parse_feed("bulletin", read_file(data_dir() / "feed_three.rss"));
  ASSERT_EQ(parsed.stubs.size(), 3u);
  EXPECT_TRUE(parsed.issues.empty());
  EXPECT_EQ(parsed.stubs[0].title, "Rent freeze vote set for Thursday");
  EXPECT_EQ(parsed.stubs[0].url, "https://bulletin.example/rent-freeze");
  EXPECT_EQ(parsed.stubs[1].title, "New clinic opens in Jackson Heights");
  EXPECT_EQ(parsed.stubs[1].url, "https://bulletin.example/clinic");
  EXPECT_EQ(parsed.stubs[2].title, "Job fair draws 400 applicants & employers");
  EXPECT_EQ(parsed.stubs[2].url, "https://bulletin.example/job-fair");
  EXPECT_EQ(parsed.stubs[0].published_at, parse_iso8601("2024-03-04T09:30:00Z"));
  EXPECT_EQ(parsed.stubs[1].published_at, parse_iso8601("2024-03-05T14:00:00Z"));
  EXPECT_FALSE(parsed.stubs[2].published_at);
  for (const auto& s : parsed.stubs) EXPECT_EQ(s.source_id, "bulletin");
}

TEST(Feed, EmptyWellFormedFeed) {
  const auto parsed = parse_feed("quiet", read_file(data_dir() / "feed_empty.rss"));
  EXPECT_TRUE(parsed.stubs.empty());
  EXPECT_TRUE(parsed.issues.empty());
}

TEST(Feed, ItemWithoutLinkIsReported) {
  const auto xml = read_file(data_dir() / "feed_missing_link.rss");
  const auto parsed = parse_feed("half", xml);
  ASSERT_EQ(parsed.stubs.size(), 1u);
  EXPECT_EQ(parsed.stubs[0].url, "https://half.example/budget");
  ASSERT_EQ(parsed.issues.size(), 1u);
  EXPECT_EQ(parsed.issues[0].code, ErrorCode::MalformedFeed);
  // The offset points at the second <item> start tag.
  const auto second_item = xml.find("<item>", xml.find("<item>") + 1);
  EXPECT_EQ(parsed.issues[0].byte_offset, static_cast<std::int64_t>(second_item));
}

TEST(Feed, AtomPrefersAlternateLink) {
  const auto parsed = parse_feed("notes", read_file(data_dir() / "feed_two.atom"));
  ASSERT_EQ(parsed.stubs.size(), 2u);
  EXPECT_EQ(parsed.stubs[0].url, "https://notes.example/scholarships");
  EXPECT_EQ(parsed.stubs[0].published_at, parse_iso8601("2024-03-06T23:30:02Z"));
  EXPECT_EQ(parsed.stubs[1].url, "https://notes.example/tenants");
  EXPECT_EQ(parsed.stubs[1].title, "Tenants rally at City Hall");
}

TEST(Feed, DuplicateLinksWithinOneFeed) {
  const std::string xml =
      "<rss><channel><item><title>a</title><link>https://d.example/1</link></item>"
      "<item><title>b</title><link>https://d.example/1</link></item></channel></rss>";
  const auto parsed = parse_feed("d", xml);
  EXPECT_EQ(parsed.stubs.size(), 1u);
  EXPECT_EQ(parsed.issues.size(), 1u);
}

TEST(Feed, MalformedXmlThrowsWithOffset) {
  try {
    parse_feed("broken", read_file(data_dir() / "feed_malformed.xml"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedFeed);
    EXPECT_NE(std::string(e.what()).find("at byte "), std::string::npos);
  }
  EXPECT_EQ(code_of([] { parse_feed("x", "<html><body/></html>"); }), ErrorCode::MalformedFeed);
  EXPECT_EQ(code_of([] { parse_feed("x", ""); }), ErrorCode::MalformedFeed);
}

TEST(Feed, FetchFeedRecordsPageFailures) {
  testing_support::MapFetcher fetcher;
  auto src = make_source("bulletin");
  fetcher.pages[src.feed_url] = {200, "application/rss+xml", read_file(data_dir() / "feed_three.rss")};
  fetcher.pages["https://bulletin.example/rent-freeze"] = {200, "text/html", "<p>Rent</p>"};
  fetcher.pages["https://bulletin.example/job-fair"] = {200, "text/html", "<p>Jobs</p>"};
  const auto result = fetch_feed(src, fetcher);
  ASSERT_EQ(result.stubs.size(), 2u);
  EXPECT_EQ(result.stubs[0].raw_payload, "<p>Rent</p>");
  EXPECT_EQ(result.stubs[1].url, "https://bulletin.example/job-fair");
  ASSERT_EQ(result.issues.size(), 1u);
  EXPECT_EQ(result.issues[0].code, ErrorCode::UnreachableSource);
  EXPECT_EQ(result.issues[0].subject, "https://bulletin.example/clinic");
}

TEST(Feed, FetchFeedErrors) {
  testing_support::MapFetcher fetcher;
  EXPECT_EQ(code_of([&] { fetch_feed(make_source("gone"), fetcher); }), ErrorCode::UnreachableSource);
  EXPECT_EQ(code_of([&] { fetch_feed(make_source("off", false, true), fetcher); }), ErrorCode::InvalidSource);
  EXPECT_TRUE(fetcher.requested().size() == 1u);  // the disabled source was never requested
}

TEST(Fetch, FileUrlsAndMirrors) {
  const auto feed_path = std::filesystem::absolute(data_dir() / "feed_three.rss");
  UrlFetcher direct;
  const auto r = direct.get("file://" + feed_path.string());
  EXPECT_EQ(r.body, read_file(feed_path));
  EXPECT_EQ(r.content_type, "application/xml");

  UrlFetcher mirrored({{"https://mirror.example/", data_dir()}});
  EXPECT_EQ(mirrored.get("https://mirror.example/feed_two.atom?x=1").body, read_file(data_dir() / "feed_two.atom"));
  EXPECT_EQ(code_of([&] { mirrored.get("https://mirror.example/nope.xml"); }), ErrorCode::UnreachableSource);
}

TEST(Fetch, UnreachableHost) {
  UrlFetcher fetcher({}, std::chrono::seconds{2});
  EXPECT_EQ(code_of([&] { fetcher.get("http://127.0.0.1:1/feed.xml"); }), ErrorCode::UnreachableSource);
  EXPECT_EQ(code_of([&] { fetcher.get("gopher://x.example/"); }), ErrorCode::UnreachableSource);
}

// ---- extraction ----

TEST(Extract, DropsScriptContent) {
  const auto e = extract_text("<html><body><p>Hello</p><script>x()</script></body></html>", "text/html");
  EXPECT_EQ(e.body, "Hello");
}

TEST(Extract, PlainTextIsIdentity) {
  EXPECT_EQ(extract_text("abc", "text/plain").body, "abc");
}

TEST(Extract, FourParagraphPageMatchesAnnotation) {
  const auto e = extract_text(read_file(data_dir() / "page_four_paragraphs.html"), "text/html; charset=utf-8");
  auto expected = read_file(data_dir() / "page_four_paragraphs.txt");
  while (!expected.empty() && expected.back() == '\n') expected.pop_back();
  EXPECT_EQ(e.body, expected);
  EXPECT_EQ(e.title, "Housing lottery opens in Astoria");
  EXPECT_EQ(std::count(e.body.begin(), e.body.end(), '\n'), 3);
  for (const char* noise : {"Home", "Opinion", "Sign in", "tracker", "font-weight", "Hidden", "Privacy"})
    EXPECT_EQ(e.body.find(noise), std::string::npos) << noise;
}

TEST(Extract, IdempotentOnOwnOutput) {
  const auto first = extract_text(read_file(data_dir() / "page_four_paragraphs.html"), "text/html");
  EXPECT_EQ(extract_text(first.body, "text/plain").body, first.body);
  for (const auto& [path, content] : service::fixtures::generate_fixture_files()) {
    if (path.rfind("articles/", 0) != 0) continue;
    const auto body = extract_text(content, "text/html").body;
    EXPECT_EQ(extract_text(body, "text/plain").body, body) << path;
  }
}

TEST(Extract, NestedBoilerplate) {
  const auto e = extract_text(
      "<div><header><nav><p>menu</p></nav><p>masthead</p></header><p>Story  text</p>"
      "<aside><div><p>related</p></div></aside><p>More</p></div>",
      "text/html");
  EXPECT_EQ(e.body, "Story text\nMore");
}

TEST(Extract, DeclaredCharsetFallback) {
  const auto e = extract_text(read_file(data_dir() / "page_cp1252.html"), "text/html");
  EXPECT_EQ(e.body, "Café owners “welcome” the rule");
  const auto latin1 = extract_text("na\xefve caf\xe9", "text/plain; charset=ISO-8859-1");
  EXPECT_EQ(latin1.body, "naïve café");
}

TEST(Extract, Errors) {
  EXPECT_EQ(code_of([] { extract_text("caf\xe9", "text/plain"); }), ErrorCode::UndecodablePayload);
  EXPECT_EQ(code_of([] { extract_text("caf\xe9", "text/plain; charset=x-no-such-charset"); }),
            ErrorCode::UndecodablePayload);
  EXPECT_EQ(code_of([] { extract_text("<html><nav>only nav</nav><script>1</script></html>", "text/html"); }),
            ErrorCode::EmptyAfterExtraction);
  EXPECT_EQ(code_of([] { extract_text("   \n\t ", "text/plain"); }), ErrorCode::EmptyAfterExtraction);
}

TEST(Extract, Utf8BomAndBengali) {
  const auto e = extract_text("\xEF\xBB\xBF<p>কুইন্স  আবাসন</p>", "text/html");
  EXPECT_EQ(e.body, "কুইন্স আবাসন");
}

// ---- dedup ----

TEST(Dedup, NormalizationContract) {
  EXPECT_EQ(dedup_key("A  b"), dedup_key("a b"));
  EXPECT_EQ(dedup_key(" A\n\tB "), dedup_key("a b"));
  EXPECT_EQ(dedup_key(""), dedup_key(""));
  EXPECT_EQ(dedup_key(""), 0xcbf29ce484222325ULL);  // FNV-1a of the empty string
  // NFC: precomposed and decomposed e-acute hash the same.
  EXPECT_EQ(dedup_key("café"), dedup_key("café"));
  EXPECT_NE(dedup_key("a b"), dedup_key("a c"));
}

TEST(Dedup, FixtureArticlesHaveDistinctKeys) {
  std::set<std::uint64_t> keys;
  std::size_t pages = 0;
  for (const auto& [path, content] : service::fixtures::generate_fixture_files()) {
    if (path.rfind("articles/", 0) != 0) continue;
    ++pages;
    keys.insert(dedup_key(extract_text(content, "text/html").body));
  }
  EXPECT_EQ(pages, 60u);
  EXPECT_EQ(keys.size(), pages);
}

TEST(Article, JsonRoundTrip) {
  Article a;
  a.id = article_id_for(dedup_key("body"));
  a.source_id = "s";
  a.url = "https://s.example/1";
  a.title = "T";
  a.body = "body";
  a.language = "en";
  a.published_at = parse_iso8601("2024-01-02T03:04:05.678Z");
  a.fetched_at = *parse_iso8601("2024-01-03T00:00:00Z");
  a.dedup_hash = dedup_key("body");
  a.class_label = "housing";
  a.topic_scores = {{"housing", 0.25}};
  const auto back = article_from_json(to_json(a));
  EXPECT_EQ(to_json(back), to_json(a));
  EXPECT_EQ(back.dedup_hash, a.dedup_hash);
  EXPECT_EQ(code_of([] { article_from_json({{"id", 3}}); }), ErrorCode::StoreCorrupt);
}
