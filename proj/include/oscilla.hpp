#pragma once

#include "oscilla/acceptance.hpp"
#include "oscilla/common.hpp"
#include "oscilla/config.hpp"
#include "oscilla/criteria.hpp"
#include "oscilla/critical.hpp"
#include "oscilla/csv.hpp"
#include "oscilla/envelope.hpp"
#include "oscilla/gaps.hpp"
#include "oscilla/profile.hpp"
#include "oscilla/quadrature.hpp"
#include "oscilla/runner.hpp"
#include "oscilla/runner_json.hpp"
#include "oscilla/solver.hpp"
#include "oscilla/spectral.hpp"
