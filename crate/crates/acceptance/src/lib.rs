//! Holds the `acceptance` test target of `levy-swarm`. It lives in its own
//! package so that a failing criterion does not stop the library's suites.
