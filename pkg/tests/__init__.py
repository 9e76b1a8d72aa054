"""PE homology tests."""
