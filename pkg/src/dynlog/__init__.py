# Request log package
