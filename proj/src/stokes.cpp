namespace wkbdet {}
