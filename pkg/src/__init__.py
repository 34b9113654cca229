# opcraft - learn symbolic operators from demonstrations and plan with them
