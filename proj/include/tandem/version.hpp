#pragma once

#define TANDEM_VERSION "0.1.0"
