namespace convexa {}
