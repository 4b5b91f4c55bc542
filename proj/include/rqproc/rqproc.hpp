#pragma once

#include "rqproc/asymptotics.hpp"
#include "rqproc/dataset.hpp"
#include "rqproc/error_models.hpp"
#include "rqproc/io.hpp"
#include "rqproc/jaeckel.hpp"
#include "rqproc/lp.hpp"
#include "rqproc/montecarlo.hpp"
#include "rqproc/quantreg.hpp"
#include "rqproc/rank_scores.hpp"
#include "rqproc/ranks.hpp"
#include "rqproc/rng.hpp"
#include "rqproc/serialize.hpp"
#include "rqproc/twostep.hpp"
#include "rqproc/version.hpp"
