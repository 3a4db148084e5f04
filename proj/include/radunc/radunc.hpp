#pragma once

#include "radunc/config.hpp"
#include "radunc/csv.hpp"
#include "radunc/error.hpp"
#include "radunc/expand.hpp"
#include "radunc/gaussian.hpp"
#include "radunc/io.hpp"
#include "radunc/judge.hpp"
#include "radunc/metrics.hpp"
#include "radunc/model.hpp"
#include "radunc/pathway.hpp"
#include "radunc/ranking.hpp"
#include "radunc/simulate.hpp"
#include "radunc/svg.hpp"
#include "radunc/trueskill.hpp"
