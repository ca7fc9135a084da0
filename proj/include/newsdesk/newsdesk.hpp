#pragma once

#include "newsdesk/classifier/evaluate.hpp"
#include "newsdesk/classifier/model_io.hpp"
#include "newsdesk/classifier/softmax_regression.hpp"
#include "newsdesk/error.hpp"
#include "newsdesk/features/featurize.hpp"
#include "newsdesk/features/lexicon.hpp"
#include "newsdesk/features/matrix.hpp"
#include "newsdesk/features/vocabulary.hpp"
#include "newsdesk/ingest/article.hpp"
#include "newsdesk/ingest/extract.hpp"
#include "newsdesk/ingest/feed.hpp"
#include "newsdesk/ingest/fetch.hpp"
#include "newsdesk/ingest/source.hpp"
#include "newsdesk/service/api.hpp"
#include "newsdesk/service/config.hpp"
#include "newsdesk/service/fixtures.hpp"
#include "newsdesk/service/newsdesk.hpp"
#include "newsdesk/service/store.hpp"
#include "newsdesk/translator/backend.hpp"
#include "newsdesk/translator/chunk.hpp"
#include "newsdesk/translator/mock.hpp"
#include "newsdesk/translator/qa.hpp"
#include "newsdesk/translator/remote.hpp"
#include "newsdesk/translator/translate.hpp"
