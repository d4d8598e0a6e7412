#pragma once

#include "pilotwave/channel.hpp"
#include "pilotwave/config.hpp"
#include "pilotwave/experiment.hpp"
#include "pilotwave/fft.hpp"
#include "pilotwave/filter.hpp"
#include "pilotwave/io.hpp"
#include "pilotwave/metrics.hpp"
#include "pilotwave/prbs.hpp"
#include "pilotwave/runconfig.hpp"
#include "pilotwave/rx.hpp"
#include "pilotwave/signal.hpp"
#include "pilotwave/tx.hpp"
