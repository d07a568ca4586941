#pragma once

#include "probekit/corpus.hpp"
#include "probekit/features.hpp"
#include "probekit/harness.hpp"
#include "probekit/probe.hpp"
#include "probekit/projection.hpp"
#include "probekit/report.hpp"
