# Core functionality package
